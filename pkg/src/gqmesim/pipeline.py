"""Run configuration and the end-to-end workflow.

kernel (oracle PFIs -> Volterra, or a series file) -> GQME propagation ->
per-step dilation -> transpilation -> statevector emulation -> readout.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuit.emulator import exact_populations, retrieve_populations, run_statevector, sample_shots
from .circuit.gates import GateSequence, write_circuit
from .circuit.transpile import transpile
from .dilation import dilate_step
from .errors import ValidationError
from .gqme import propagate_gqme, sigma_z_curve, solve_volterra
from .liouville import frobenius_norm, operator_norm
from .oracle import compute_pfis
from .series import (
    MemoryKernelSeries,
    PfiSeries,
    PropagatorSeries,
    UnitarySeries,
    read_series,
    write_series,
)
from .spinboson import (
    PRESETS,
    SpinBosonParams,
    TruncatedBathSpace,
    discretize_spectral_density,
    preset,
    projected_liouvillian,
)

log = logging.getLogger(__name__)

PARAM_KEYS = tuple(f.name for f in dataclasses.fields(SpinBosonParams))
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class RunConfig:
    model: str = "model4"
    kernel_source: str = "oracle"  # or file:<path>
    steps: int = 4000
    shots: int = 2000
    seed: int = 0
    stride: int = 1
    output_dir: str = "run"
    exact_mode: bool = False
    n_modes: int = 2  # bath modes used by the oracle
    fock_dim: int = 8
    discretization: str = "log"
    global_nc: bool = False
    jobs: int = 1
    save_circuits: bool = True
    overrides: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.stride < 1:
            raise ValidationError("stride must be at least 1")
        if self.steps < 1:
            raise ValidationError("steps must be at least 1")
        if self.shots < 1:
            raise ValidationError("shots must be positive")
        if self.jobs < 1:
            raise ValidationError("jobs must be at least 1")
        if self.model not in PRESETS:
            raise ValidationError(f"unknown model {self.model!r}; choose from {sorted(PRESETS)}")
        if not (self.kernel_source == "oracle" or self.kernel_source.startswith("file:")):
            raise ValidationError("kernel_source must be 'oracle' or 'file:<path>'")

    def params(self) -> SpinBosonParams:
        changes = dict(self.overrides)
        changes.setdefault("n_modes", self.n_modes)
        return preset(self.model, **changes)

    def emitted_steps(self) -> np.ndarray:
        return np.arange(0, self.steps, self.stride)


def _coerce(key: str, raw: str, current):
    if isinstance(current, bool):
        low = raw.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValidationError(f"{key}: expected a boolean, got {raw!r}")
    try:
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
    except ValueError:
        raise ValidationError(f"{key}: cannot parse {raw!r}") from None
    return raw.strip()


def parse_assignments(pairs: list[str], base: RunConfig | None = None) -> RunConfig:
    """Apply ``key=value`` strings on top of ``base`` (defaults if omitted)."""
    values = dataclasses.asdict(base or RunConfig())
    overrides = dict(values.pop("overrides"))
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"expected key=value, got {pair!r}")
        key, raw = (s.strip() for s in pair.split("=", 1))
        if key in PARAM_KEYS and key != "n_modes":
            try:
                overrides[key] = float(raw)
            except ValueError:
                raise ValidationError(f"{key}: cannot parse {raw!r}") from None
        elif key in values:
            values[key] = _coerce(key, raw, values[key])
        else:
            raise ValidationError(f"unknown config key {key!r}")
    return RunConfig(**values, overrides=overrides)


def load_config(path: str | Path | None, overrides: list[str] = ()) -> RunConfig:
    """Flat ``key = value`` file ('#' starts a comment), then command-line overrides."""
    pairs: list[str] = []
    if path is not None:
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                pairs.append(line)
    return parse_assignments(pairs + list(overrides))


# stages ---------------------------------------------------------------------


def oracle_kernel(params: SpinBosonParams, fock_dim: int, steps: int, scheme: str = "log"):
    modes = discretize_spectral_density(params, scheme)
    pfis = compute_pfis(params, modes, TruncatedBathSpace(fock_dim), steps)
    return pfis, solve_volterra(pfis, projected_liouvillian(params))


def load_kernel(path: str | Path, params: SpinBosonParams) -> MemoryKernelSeries:
    series = read_series(path)
    if isinstance(series, PfiSeries):
        return solve_volterra(series, projected_liouvillian(params))
    if not isinstance(series, MemoryKernelSeries):
        raise ValidationError(f"{path}: expected a kernel or pfi series, got kind={series.kind}")
    return series


def dilate_series(
    prop: PropagatorSeries, steps: np.ndarray | None = None, global_nc: bool = False
) -> UnitarySeries:
    """Per-step dilations; ``global_nc`` uses the largest norm over the selected steps."""
    idx = np.arange(prop.steps) if steps is None else np.asarray(steps)
    mats = prop.G[idx]
    nc = None
    if global_nc:
        nc = max(1.0, max(operator_norm(g) for g in mats))
    dil = [dilate_step(g, nc) for g in mats]
    return UnitarySeries(
        prop.dt, np.array([d.matrix for d in dil]), np.array([d.n_c for d in dil]), prop.ne
    )


@dataclass(frozen=True)
class StepResult:
    step: int
    sigma_z: float
    n_c: float
    circuit: GateSequence
    counts: dict[str, int]


def emulate_step(
    step: int,
    unitary: np.ndarray,
    n_c: float,
    sigma0: np.ndarray,
    shots: int | None,
    seed: int,
) -> StepResult:
    """Transpile one dilated unitary, run it on (v/|v|, 0...) and read sigma_z."""
    v = np.asarray(sigma0, dtype=complex).reshape(-1)
    fnorm = frobenius_norm(v)
    ne = int(round(np.sqrt(v.size)))
    seq = transpile(unitary)
    state = np.zeros(unitary.shape[0], dtype=complex)
    state[: v.size] = v / fnorm
    amps = run_statevector(seq, state)
    if shots is None:
        pops = exact_populations(amps, n_c, fnorm, ne)
    else:
        hist = sample_shots(amps, shots, np.random.SeedSequence([seed, step]))
        pops = retrieve_populations(hist, n_c, fnorm, ne)
    return StepResult(step, pops.sigma_z, float(n_c), seq, seq.counts())


def _emulate_chunk(args) -> list[StepResult]:
    steps, unitaries, ncs, sigma0, shots, seed = args
    return [
        emulate_step(int(s), u, nc, sigma0, shots, seed)
        for s, u, nc in zip(steps, unitaries, ncs)
    ]


def emulate_series(
    unitaries: UnitarySeries,
    steps: np.ndarray,
    sigma0: np.ndarray,
    shots: int | None,
    seed: int,
    jobs: int = 1,
) -> list[StepResult]:
    """Emulate every unitary; ``jobs > 1`` fans contiguous chunks out to processes."""
    steps = np.asarray(steps)
    n = len(steps)
    if jobs <= 1 or n < 2:
        return _emulate_chunk((steps, unitaries.unitaries, unitaries.n_c, sigma0, shots, seed))
    bounds = np.linspace(0, n, min(jobs, n) + 1).astype(int)
    tasks = [
        (steps[a:b], unitaries.unitaries[a:b], unitaries.n_c[a:b], sigma0, shots, seed)
        for a, b in zip(bounds[:-1], bounds[1:])
    ]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [r for chunk in pool.map(_emulate_chunk, tasks) for r in chunk]


@dataclass(frozen=True)
class PipelineResult:
    steps: np.ndarray
    times: np.ndarray
    sigma_z_classical: np.ndarray
    sigma_z_emulated: np.ndarray
    n_c: np.ndarray
    output_dir: Path


SIGMA_Z_HEADER = ["step", "t", "sigma_z_classical", "sigma_z_emulated", "n_c"]


def run_pipeline(config: RunConfig, sigma0: np.ndarray | None = None) -> PipelineResult:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = config.params()
    if sigma0 is None:
        sigma0 = np.diag([1.0, 0.0]).astype(complex)

    if config.kernel_source == "oracle":
        log.info("oracle kernel: %s, %d modes, fock_dim %d", config.model, params.n_modes, config.fock_dim)
        pfis, kernel = oracle_kernel(params, config.fock_dim, config.steps, config.discretization)
        write_series(pfis, out / "pfi.series")
    else:
        kernel = load_kernel(config.kernel_source[len("file:") :], params)
    write_series(kernel, out / "kernel.series")

    if config.steps > kernel.steps:
        raise ValidationError(f"steps={config.steps} exceeds the kernel length {kernel.steps}")
    prop = propagate_gqme(projected_liouvillian(params), kernel, config.steps)
    write_series(prop, out / "propagator.series")

    steps = config.emitted_steps()
    classical = sigma_z_curve(prop, sigma0)[steps]
    unitaries = dilate_series(prop, steps, config.global_nc)
    write_series(unitaries, out / "unitaries.series")

    shots = None if config.exact_mode else config.shots
    results = emulate_series(unitaries, steps, sigma0, shots, config.seed, config.jobs)
    if config.save_circuits:
        cdir = out / "circuits"
        cdir.mkdir(exist_ok=True)
        for r in results:
            write_circuit(r.circuit, cdir / f"step_{r.step:05d}.qc")

    emulated = np.array([r.sigma_z for r in results])
    ncs = np.array([r.n_c for r in results])
    times = steps * kernel.dt
    with open(out / "sigma_z.csv", "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(SIGMA_Z_HEADER)
        for row in zip(steps, times, classical, emulated, ncs):
            w.writerow([int(row[0])] + [repr(float(x)) for x in row[1:]])
    return PipelineResult(steps, times, classical, emulated, ncs, out)
