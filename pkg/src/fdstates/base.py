"""Scenario configuration and the scenario runner."""

import json
import logging
import numbers
import os
import time
from concurrent.futures import ThreadPoolExecutor
from copy import deepcopy

import numpy as np
from tqdm import tqdm

from fdstates.analytic import coherent_amplitudes, fd_coherent_state, fd_squeezed_vacuum
from fdstates.dynamics import (
    KickSchedule,
    evolve_continuous,
    evolve_envelope,
    evolve_kicked,
    evolve_kicked_dissipative,
)
from fdstates.errors import ConfigurationError, SchemaError
from fdstates.model import (
    DRIVE_KINDS,
    LINEAR,
    PARAMETRIC,
    ConstantEnvelope,
    DeltaTrain,
    KerrModel,
    PeriodicTabulated,
    pulse_area,
)
from fdstates.operators import DensityMatrix, StateVector
from fdstates.report import RunReport, write_csv

logger = logging.getLogger(__name__)

CONTINUOUS = "continuous"
KICKED = "kicked"
KICKED_DISSIPATIVE = "kicked_dissipative"
ENGINES = (CONTINUOUS, KICKED, KICKED_DISSIPATIVE)

ENVELOPES = ("constant", "delta_train", "periodic_tabulated")
ENGINE_ENVELOPES = {
    CONTINUOUS: ("constant", "periodic_tabulated"),
    KICKED: ("delta_train",),
    KICKED_DISSIPATIVE: ("delta_train",),
}
TARGET_KINDS = ("fd_coherent", "fd_squeezed")

PRESET_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), "presets")

VERIFY_EPS = np.pi / 50
VERIFY_BOUND = 2e-2
VERIFY_MAX_ORDER = 8
VERIFY_SAMPLES = 401


class ScenarioConfig:
    """Configuration of a single simulation scenario.

    Configurations are modular and can be combined using the addition operation.
    Each parameter is accessible as an attribute when specified.

    Attributes:
        name (str): Scenario name, used for the output file names.
        engine (str): ``"continuous"``, ``"kicked"`` or ``"kicked_dissipative"``.
        order (int): Kerr order N.
        chi (float): Nonlinearity constant.
        eps (float): Drive strength.
        dim (int or None): Truncation dimension; ``None`` selects ``order + 3``.
        drive (str): ``"linear"`` or ``"parametric"``.
        envelope (str): ``"constant"`` or ``"periodic_tabulated"`` (continuous
            engine), ``"delta_train"`` (kicked engines).
        envelope_samples (list): Samples of one period of a tabulated envelope.
        period (float): Kick period T, or the period of a tabulated envelope.
        gamma (float): Damping constant (dissipative engine only).
        duration (float): Final time of a continuous run.
        n_pulses (int): Number of kicks of a kicked run.
        sample_count (int): Number of samples of a continuous run, at least 2.
        initial_level (int): Fock level the system starts in.
        target (dict or None): ``{"kind": "fd_coherent" | "fd_squeezed"}`` with an
            optional fixed ``"alpha"`` / ``"xi"`` (number or ``[re, im]``) and
            optional ``"s"``. Without a fixed parameter the target follows the
            pulse area: ``alpha = -i Theta``, ``xi = -2i Theta``.
        csv_path (str or None): Output path of the time series.
        report_path (str or None): Output path of the JSON report.
        progress (bool): Show progress bars.
        _entries (dict): Dict with parameter keys and values.
    """

    allowed_parameters = {
        "name",
        "engine",
        "order",
        "chi",
        "eps",
        "dim",
        "drive",
        "envelope",
        "envelope_samples",
        "period",
        "gamma",
        "duration",
        "n_pulses",
        "sample_count",
        "initial_level",
        "target",
        "csv_path",
        "report_path",
        "progress",
    }

    def __init__(self, **entries):
        """Initializes ScenarioConfig object."""
        for param in entries:
            if param not in self.allowed_parameters:
                raise SchemaError(param, "Parameter %s is not valid." % param)
        self._entries = entries

        for key, value in self._entries.items():
            setattr(self, key, value)

    @classmethod
    def from_json(cls, path):
        """Reads a configuration from a JSON document holding one scenario."""
        with open(path) as f:
            try:
                entries = json.load(f)
            except json.JSONDecodeError as err:
                raise SchemaError("<document>", "not valid JSON (%s)." % err) from err
        if not isinstance(entries, dict):
            raise SchemaError("<document>", "a scenario must be a JSON object.")
        return cls(**entries)

    def __add__(self, other):
        """Combines two configurations and returns a new one.

        If parameters are defined in both configurations, then `other` takes precedence.

        Raises:
            TypeError: When other is not an instance of ScenarioConfig.
        """
        if not isinstance(other, ScenarioConfig):
            raise TypeError(
                "other is an instance of %s instead of %s." % (type(other), type(self))
            )

        entries = deepcopy(self._entries)
        entries.update(other._entries)  # pylint: disable=W0212

        return ScenarioConfig(**entries)

    def get(self, key, default=None):
        """Returns the parameter `key` or `default` when it is not set."""
        return self._entries.get(key, default)

    def to_dict(self):
        """Copy of the parameter entries."""
        return deepcopy(self._entries)

    def validate(self):
        """Checks types, ranges and engine compatibility of all parameters.

        Raises:
            SchemaError: If a field is missing or malformed.
            ConfigurationError: If valid fields combine into an unsupported run.
        """
        if not isinstance(self.get("name"), str) or not self.get("name"):
            raise SchemaError("name", "a non-empty string is required.")
        if self.get("engine") not in ENGINES:
            raise SchemaError("engine", "must be one of %s." % (ENGINES,))
        _require_int("order", self.get("order"), minimum=1)
        _require_real("chi", self.get("chi"), positive=True)
        _require_real("eps", self.get("eps"), minimum=0.0)
        if self.get("dim") is not None:
            _require_int("dim", self.get("dim"), minimum=1)
        if self.get("drive") not in DRIVE_KINDS:
            raise SchemaError("drive", "must be one of %s." % (DRIVE_KINDS,))
        if self.get("envelope") not in ENVELOPES:
            raise SchemaError("envelope", "must be one of %s." % (ENVELOPES,))
        _require_real("gamma", self.get("gamma"), minimum=0.0)
        _require_int("sample_count", self.get("sample_count"), minimum=2)
        _require_int("initial_level", self.get("initial_level"), minimum=0)

        engine = self.get("engine")
        if engine == CONTINUOUS:
            _require_real("duration", self.get("duration"), positive=True)
            if self.get("envelope") == "periodic_tabulated":
                _require_real("period", self.get("period"), positive=True)
                _require_samples("envelope_samples", self.get("envelope_samples"))
        else:
            _require_real("period", self.get("period"), positive=True)
            _require_int("n_pulses", self.get("n_pulses"), minimum=0)
        self._validate_target()

        dim = self.get("dim") or self.get("order") + 3
        if self.get("initial_level") >= dim:
            raise SchemaError("initial_level", "must be below dim = %d." % dim)
        if self.get("envelope") not in ENGINE_ENVELOPES[engine]:
            raise ConfigurationError(
                "Engine %s does not support envelope %s." % (engine, self.get("envelope"))
            )
        if engine != KICKED_DISSIPATIVE and self.get("gamma") > 0:
            raise ConfigurationError("gamma > 0 needs the %s engine." % KICKED_DISSIPATIVE)
        return self

    def _validate_target(self):
        target = self.get("target")
        if target is None:
            return
        if not isinstance(target, dict) or target.get("kind") not in TARGET_KINDS:
            raise SchemaError("target", "needs a kind in %s." % (TARGET_KINDS,))
        for key in target:
            if key not in ("kind", "alpha", "xi", "s"):
                raise SchemaError("target", "unknown key %s." % key)
        for key in ("alpha", "xi"):
            if key in target:
                _parse_complex("target", target[key])
        if "s" in target:
            _require_int("target", target["s"], minimum=1)
        if target["kind"] == "fd_squeezed" and self.get("drive") != PARAMETRIC:
            raise ConfigurationError("An fd_squeezed target needs the parametric drive.")
        if target["kind"] == "fd_coherent" and self.get("drive") != LINEAR:
            raise ConfigurationError("An fd_coherent target needs the linear drive.")


def _require_int(field, value, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise SchemaError(field, "an integer is required, got %r." % (value,))
    if minimum is not None and value < minimum:
        raise SchemaError(field, "must be >= %d, got %r." % (minimum, value))


def _require_real(field, value, minimum=None, positive=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise SchemaError(field, "a number is required, got %r." % (value,))
    if not np.isfinite(value):
        raise SchemaError(field, "must be finite, got %r." % (value,))
    if positive and not value > 0:
        raise SchemaError(field, "must be positive, got %r." % (value,))
    if minimum is not None and value < minimum:
        raise SchemaError(field, "must be >= %g, got %r." % (minimum, value))


def _require_samples(field, value):
    if not isinstance(value, list) or len(value) < 2:
        raise SchemaError(field, "a list of at least 2 numbers is required.")
    for sample in value:
        _require_real(field, sample)


def _parse_complex(field, value):
    if isinstance(value, bool):
        raise SchemaError(field, "a number or [re, im] pair is required.")
    if isinstance(value, numbers.Real):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(v, numbers.Real) and not isinstance(v, bool) for v in value)
    ):
        return complex(value[0], value[1])
    raise SchemaError(field, "a number or [re, im] pair is required, got %r." % (value,))


DEFAULT_CONFIG = ScenarioConfig(
    engine=CONTINUOUS,
    chi=1.0,
    dim=None,
    drive=LINEAR,
    envelope="constant",
    gamma=0.0,
    sample_count=501,
    initial_level=0,
    target=None,
    csv_path=None,
    report_path=None,
    progress=False,
)


def list_presets():
    """Names of the presets shipped with the package."""
    return sorted(
        os.path.splitext(name)[0]
        for name in os.listdir(PRESET_DIR)
        if name.endswith(".json")
    )


def load_preset(name):
    """Loads the preset `name` from the package preset directory.

    Raises:
        ConfigurationError: If no such preset exists.
    """
    path = os.path.join(PRESET_DIR, "%s.json" % name)
    if not os.path.isfile(path):
        raise ConfigurationError(
            "Unknown preset %s; available: %s." % (name, ", ".join(list_presets()))
        )
    return ScenarioConfig.from_json(path)


class Scenario:
    """Executable scenario: a model, an engine and the sampling of the run.

    Attributes:
        name (str): Scenario name.
        model (KerrModel): The driven Kerr model.
        engine (str): Engine name.
        initial_state (StateVector): State at t = 0.
        duration (float or None): Final time of a continuous run.
        schedule (KickSchedule or None): Kick timing of kicked runs.
        sample_count (int): Samples of a continuous run.
        gamma (float): Damping constant.
        target (callable or None): ``t -> StateVector``.
        csv_path (str or None): Explicit CSV output path.
        report_path (str or None): Explicit report output path.
        progress (bool): Show progress bars.
    """

    def __init__(
        # pylint: disable=C0330
        self,
        name,
        model,
        engine,
        initial_state,
        duration=None,
        schedule=None,
        sample_count=501,
        gamma=0.0,
        target=None,
        csv_path=None,
        report_path=None,
        progress=False,
    ):
        """Initializes Scenario object."""
        self.name = name
        self.model = model
        self.engine = engine
        self.initial_state = initial_state
        self.duration = duration
        self.schedule = schedule
        self.sample_count = sample_count
        self.gamma = gamma
        self.target = target
        self.csv_path = csv_path
        self.report_path = report_path
        self.progress = progress

    @classmethod
    def from_config(cls, config=None):
        """Initializes a Scenario from a ScenarioConfig object.

        Parameters that are not explicitly specified in `config` are taken from
        ``DEFAULT_CONFIG``. The combined configuration is validated first.

        Args:
            config (ScenarioConfig): Scenario configuration.

        Returns:
            Scenario: Scenario ready to run.

        Raises:
            SchemaError: If a field is missing or malformed.
            ConfigurationError: If the engine does not support the envelope.
        """
        if config is None:
            config = DEFAULT_CONFIG
        else:
            config = DEFAULT_CONFIG + config
        config.validate()

        engine = config.engine
        schedule = None
        if engine == CONTINUOUS and config.envelope == "periodic_tabulated":
            envelope = PeriodicTabulated(config.period, config.envelope_samples)
        elif engine == CONTINUOUS:
            envelope = ConstantEnvelope()
        else:
            envelope = DeltaTrain(config.period)
            schedule = KickSchedule(config.period, config.n_pulses)

        model = KerrModel(
            config.order,
            config.chi,
            config.eps,
            dim=config.dim,
            drive=config.drive,
            envelope=envelope,
        )
        return cls(
            config.name,
            model,
            engine,
            StateVector.fock(config.initial_level, model.dim),
            duration=config.get("duration"),
            schedule=schedule,
            sample_count=config.sample_count,
            gamma=float(config.gamma),
            target=_build_target(config, model),
            csv_path=config.csv_path,
            report_path=config.report_path,
            progress=config.progress,
        )

    def simulate(self, gamma=None):
        """Runs the engine and returns the SimulationResult.

        Args:
            gamma (float): Overrides the damping constant of a dissipative run.
        """
        gamma = self.gamma if gamma is None else gamma
        if self.engine == CONTINUOUS and isinstance(self.model.envelope, PeriodicTabulated):
            return evolve_envelope(
                self.model, self.initial_state, self.duration, self.sample_count, self.target
            )
        if self.engine == CONTINUOUS:
            return evolve_continuous(
                self.model, self.initial_state, self.duration, self.sample_count, self.target
            )
        if self.engine == KICKED:
            return evolve_kicked(
                self.model, self.initial_state, self.schedule, self.target, self.progress
            )
        return evolve_kicked_dissipative(
            self.model,
            DensityMatrix.from_state(self.initial_state),
            gamma,
            self.schedule,
            self.target,
            self.progress,
        )

    def run(self, out_dir="."):
        """Simulates, writes the CSV time series and the JSON report.

        Dissipative runs also simulate the undamped baseline and report the
        peak and oscillation-amplitude ratios against it.

        Args:
            out_dir (str): Directory for outputs without an explicit path.

        Returns:
            RunReport
        """
        logger.info("Running scenario %s with the %s engine.", self.name, self.engine)
        start = time.perf_counter()
        result = self.simulate()
        damping = None
        if self.engine == KICKED_DISSIPATIVE:
            baseline = self.simulate(gamma=0.0)
            damping = _damping_summary(self.gamma, result, baseline)
        elapsed = time.perf_counter() - start

        report = RunReport.from_result(
            self.name, result, self.model.order, elapsed, damping=damping
        )
        csv_path = self.csv_path or os.path.join(out_dir, "%s.csv" % self.name)
        report_path = self.report_path or os.path.join(out_dir, "%s.json" % self.name)
        for path in (csv_path, report_path):
            directory = os.path.dirname(path)
            if directory:
                os.makedirs(directory, exist_ok=True)
        write_csv(result, csv_path)
        report.to_json(report_path)
        logger.info("Wrote %s and %s.", csv_path, report_path)
        return report


def _build_target(config, model):
    target = config.get("target")
    if target is None:
        return None
    s = target.get("s", model.order - 1)
    if config.engine == CONTINUOUS:
        area = lambda t: pulse_area(model.envelope, model.eps, t)  # noqa: E731
    else:
        area = lambda t: model.eps * round(t / config.period)  # noqa: E731

    if target["kind"] == "fd_coherent":
        if "alpha" in target:
            state = fd_coherent_state(_parse_complex("target", target["alpha"]), s)
            return lambda t: state
        return lambda t: fd_coherent_state(-1j * area(t), s)

    if "xi" in target:
        state = fd_squeezed_vacuum(_parse_complex("target", target["xi"]), s)
        return lambda t: state
    return lambda t: fd_squeezed_vacuum(-2j * area(t), s)


def _damping_summary(gamma, result, baseline):
    amplitude = result.peaks() - result.troughs()
    baseline_amplitude = baseline.peaks() - baseline.troughs()
    with np.errstate(divide="ignore", invalid="ignore"):
        peak_ratio = np.where(baseline.peaks() > 0, result.peaks() / baseline.peaks(), 0.0)
        amplitude_ratio = np.where(
            baseline_amplitude > 0, amplitude / baseline_amplitude, 0.0
        )
    return {
        "gamma": gamma,
        "baseline_peaks": baseline.peaks().tolist(),
        "peak_ratio": peak_ratio.tolist(),
        "amplitude_ratio": amplitude_ratio.tolist(),
    }


def run_scenario(config, out_dir="."):
    """Builds the scenario from `config`, runs it and writes its outputs.

    Args:
        config (ScenarioConfig): Scenario configuration.
        out_dir (str): Output directory.

    Returns:
        RunReport
    """
    return Scenario.from_config(config).run(out_dir)


def closed_form_deviation(order, eps=VERIFY_EPS, chi=1.0, samples=VERIFY_SAMPLES):
    """Maximum deviation between simulated and closed-form populations.

    The continuous engine runs over pulse areas ``[0, 2 pi]`` in dimension
    ``order + 3``; levels below `order` are compared with the closed form.
    """
    model = KerrModel(order, chi, eps)
    result = evolve_continuous(
        model, StateVector.vacuum(model.dim), 2 * np.pi / eps, samples
    )
    expected = np.array(
        [np.abs(coherent_amplitudes(order, eps * t)) ** 2 for t in result.times]
    )
    return float(np.max(np.abs(result.probs[:, :order] - expected)))


def verify_closed_forms(
    n_max, bound=VERIFY_BOUND, eps=VERIFY_EPS, samples=VERIFY_SAMPLES, jobs=1, progress=False
):
    """Compares the continuous engine with the closed forms for N = 2..n_max.

    Args:
        n_max (int): Largest Kerr order, 2 <= n_max <= 8.
        bound (float): Largest accepted population deviation.
        eps (float): Drive strength (chi = 1).
        samples (int): Samples per run.
        jobs (int): Number of worker threads.
        progress (bool): Show a progress bar.

    Returns:
        RunReport: With a ``verification`` section holding the deviations and
        the overall verdict.
    """
    if isinstance(n_max, bool) or not isinstance(n_max, numbers.Integral):
        raise ConfigurationError("n_max must be an integer, got %r." % (n_max,))
    if not 2 <= n_max <= VERIFY_MAX_ORDER:
        raise ConfigurationError(
            "n_max must be between 2 and %d, got %d." % (VERIFY_MAX_ORDER, n_max)
        )
    start = time.perf_counter()
    orders = list(range(2, n_max + 1))
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        deviations = list(
            tqdm(
                pool.map(lambda n: closed_form_deviation(n, eps, samples=samples), orders),
                total=len(orders),
                disable=not progress,
            )
        )
    for order, deviation in zip(orders, deviations):
        logger.info("N = %d: max deviation %.3e (bound %.1e).", order, deviation, bound)

    verification = {
        "eps": eps,
        "bound": bound,
        "max_deviation": {str(n): d for n, d in zip(orders, deviations)},
        "passed": bool(max(deviations) <= bound),
    }
    return RunReport(
        "verify",
        peaks=[],
        troughs=[],
        max_leakage=0.0,
        wall_clock_seconds=time.perf_counter() - start,
        verification=verification,
    )
