/** Optional masking audio: looping white noise, a software stand-in for the
 * isolation headphones worn during live sessions. */

export class WhiteNoise {
  private context: AudioContext | null = null;
  private source: AudioBufferSourceNode | null = null;

  get active(): boolean {
    return this.source !== null;
  }

  start(gain = 0.12): void {
    if (this.source) return;
    this.context = this.context ?? new AudioContext();
    const seconds = 2;
    const buffer = this.context.createBuffer(
      1,
      seconds * this.context.sampleRate,
      this.context.sampleRate,
    );
    const data = buffer.getChannelData(0);
    for (let i = 0; i < data.length; i++) data[i] = Math.random() * 2 - 1;
    const source = this.context.createBufferSource();
    source.buffer = buffer;
    source.loop = true;
    const gainNode = this.context.createGain();
    gainNode.gain.value = gain;
    source.connect(gainNode).connect(this.context.destination);
    source.start();
    this.source = source;
  }

  stop(): void {
    this.source?.stop();
    this.source?.disconnect();
    this.source = null;
  }

  toggle(): boolean {
    if (this.active) this.stop();
    else this.start();
    return this.active;
  }
}
