"""hapticbench: a hardware-free workbench for vibrotactile texture rendering
and roughness psychophysics.

Covers the full desk-scale loop: synthesize grit-parameterized vibration
traces, run them through the rendering chain (high-pass, three-axis spectral
reduction, PWM scheduling), drive constant-stimuli 2AFC sessions with
simulated or live responders, and analyze the results (psychometric MLE with
bootstrap CIs, rank tests, FDR adjustment, multiple-comparison intervals,
task metrics, questionnaire scores).
"""

from .config import WorkbenchConfig
from .errors import (
    DegenerateDataError,
    EmptyInputError,
    InvalidSpecError,
    NonIdentifiableError,
    ProtocolViolationError,
    SchemaViolationError,
    SessionCompleteError,
)
from .sessions import (
    SessionLog,
    SessionPlan,
    TrialRecord,
    build_session_plan,
    new_session,
    next_trial,
    record_response,
    run_simulated_session,
    trials_from_log,
)
from .journal import SessionHandle, SessionStore
from .session_io import export_session, import_session
from .signal_chain import (
    AccelTrace,
    ActuatorModel,
    FilterSpec,
    PwmSchedule,
    ReducedSignal,
    dft321_reduce,
    highpass_filter,
    to_pwm_schedule,
)
from .textures import (
    GritLevel,
    ObserverModel,
    StimulusLibrary,
    TextureModel,
    analytic_observer_respond,
    build_stimulus_library,
    canonical_grit,
    canonical_grits,
    signal_chain_respond,
    synthesize_texture_trace,
)

__version__ = "0.1.0"
