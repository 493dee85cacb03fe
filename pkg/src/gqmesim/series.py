"""Uniform-grid series of superoperators and their text file format.

File grammar (one header line, then one record per grid point)::

    GQME-SERIES v1 kind=<kind> ne=<N> dt=<decimal> steps=<M>
    <2*N^4 decimal fields: re, im of the N^2 x N^2 matrix, row-major>
    ...  (M records)

``kind`` is ``kernel``, ``propagator``, ``pfi`` or ``unitary``.  ``pfi``
records hold F followed by Fdot (4*N^4 fields).  ``unitary`` headers add
``dim=<D>`` and each record is ``n_c`` followed by 2*D^2 fields.

Readers additionally accept an optional leading time column on kernel and
propagator records (for externally produced kernels); the times must sit on
the uniform grid ``n*dt``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, NonUniformGridError, SeriesFormatError

MAGIC = "GQME-SERIES"
VERSION = "v1"
KINDS = ("kernel", "propagator", "pfi", "unitary")
_GRID_RTOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _check_stack(mats: np.ndarray, what: str) -> np.ndarray:
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise DimensionError(f"{what} must have shape (steps, D, D), got {mats.shape}")
    if not np.all(np.isfinite(mats)):
        raise DimensionError(f"{what} has non-finite entries")
    return mats


@dataclass(frozen=True)
class _Series:
    dt: float
    matrices: np.ndarray

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise NonUniformGridError(f"dt must be positive and finite, got {self.dt}")
        mats = _check_stack(self.matrices, type(self).__name__)
        object.__setattr__(self, "matrices", _frozen(mats))

    @property
    def steps(self) -> int:
        """Number of stored grid points (t = 0, dt, ..., (steps-1)*dt)."""
        return self.matrices.shape[0]

    @property
    def ne(self) -> int:
        return math.isqrt(self.matrices.shape[1])

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.steps)

    def __len__(self) -> int:
        return self.steps

    def __getitem__(self, n):
        return self.matrices[n]


class MemoryKernelSeries(_Series):
    kind = "kernel"

    @property
    def K(self) -> np.ndarray:
        return self.matrices


class PropagatorSeries(_Series):
    kind = "propagator"

    @property
    def G(self) -> np.ndarray:
        return self.matrices


@dataclass(frozen=True)
class PfiSeries:
    """Projection-free inputs F(tau) and dF/dtau on a uniform grid."""

    dt: float
    F: np.ndarray
    Fdot: np.ndarray
    kind: str = field(default="pfi", init=False, repr=False)

    def __post_init__(self):
        f = _check_stack(self.F, "F")
        fd = _check_stack(self.Fdot, "Fdot")
        if f.shape != fd.shape:
            raise DimensionError("F and Fdot must have equal shapes")
        object.__setattr__(self, "F", _frozen(f))
        object.__setattr__(self, "Fdot", _frozen(fd))

    @property
    def steps(self) -> int:
        return self.F.shape[0]

    @property
    def ne(self) -> int:
        return math.isqrt(self.F.shape[1])

    def __len__(self) -> int:
        return self.steps


@dataclass(frozen=True)
class UnitarySeries:
    """Dilated unitaries (one per time step) with their normalization factors."""

    dt: float
    unitaries: np.ndarray
    n_c: np.ndarray
    ne: int
    kind: str = field(default="unitary", init=False, repr=False)

    def __post_init__(self):
        u = _check_stack(self.unitaries, "unitaries")
        nc = np.asarray(self.n_c, dtype=float).reshape(-1)
        if nc.shape[0] != u.shape[0]:
            raise DimensionError("one n_c value is needed per unitary")
        nc.setflags(write=False)
        object.__setattr__(self, "unitaries", _frozen(u))
        object.__setattr__(self, "n_c", nc)

    @property
    def steps(self) -> int:
        return self.unitaries.shape[0]

    @property
    def dim(self) -> int:
        return self.unitaries.shape[1]

    def __len__(self) -> int:
        return self.steps


Series = MemoryKernelSeries | PropagatorSeries | PfiSeries | UnitarySeries


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _complex_fields(m: np.ndarray) -> list[str]:
    flat = np.asarray(m).reshape(-1)
    out = np.empty(2 * flat.size, dtype=float)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return [_fmt(x) for x in out]


def write_series(series: Series, path: str | Path) -> None:
    kind = series.kind
    header = f"{MAGIC} {VERSION} kind={kind} ne={series.ne} dt={_fmt(series.dt)} steps={series.steps}"
    if kind == "unitary":
        header += f" dim={series.dim}"
    lines = [header]
    for n in range(series.steps):
        if kind == "pfi":
            fields = _complex_fields(series.F[n]) + _complex_fields(series.Fdot[n])
        elif kind == "unitary":
            fields = [_fmt(series.n_c[n])] + _complex_fields(series.unitaries[n])
        else:
            fields = _complex_fields(series.matrices[n])
        lines.append(" ".join(fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


_HEADER_RE = re.compile(r"^(\w+)=(\S+)$")


def _parse_header(line: str) -> dict[str, str]:
    parts = line.split()
    if len(parts) < 2 or parts[0] != MAGIC:
        raise SeriesFormatError(f"missing {MAGIC} magic in header: {line[:60]!r}")
    if parts[1] != VERSION:
        raise SeriesFormatError(f"unsupported version {parts[1]!r}")
    fields = {}
    for tok in parts[2:]:
        m = _HEADER_RE.match(tok)
        if not m:
            raise SeriesFormatError(f"malformed header token {tok!r}")
        fields[m.group(1)] = m.group(2)
    for key in ("kind", "ne", "dt", "steps"):
        if key not in fields:
            raise SeriesFormatError(f"header lacks {key}=")
    if fields["kind"] not in KINDS:
        raise SeriesFormatError(f"unknown kind {fields['kind']!r}")
    return fields


def _to_complex(values: np.ndarray, dim: int) -> np.ndarray:
    return (values[0::2] + 1j * values[1::2]).reshape(dim, dim)


def read_series(path: str | Path) -> Series:
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SeriesFormatError("empty file")
    hdr = _parse_header(lines[0])
    try:
        ne = int(hdr["ne"])
        dt = float(hdr["dt"])
        steps = int(hdr["steps"])
    except ValueError as exc:
        raise SeriesFormatError(f"bad numeric header field: {exc}") from None
    kind = hdr["kind"]
    if ne < 1 or steps < 0:
        raise SeriesFormatError("ne must be >= 1 and steps >= 0")
    if not (dt > 0 and math.isfinite(dt)):
        raise NonUniformGridError(f"dt must be positive and finite, got {hdr['dt']}")

    d2 = ne * ne
    if kind == "unitary":
        if "dim" not in hdr:
            raise SeriesFormatError("unitary header lacks dim=")
        dim = int(hdr["dim"])
        expected = 1 + 2 * dim * dim
    elif kind == "pfi":
        dim = d2
        expected = 4 * d2 * d2
    else:
        dim = d2
        expected = 2 * d2 * d2

    records = lines[1:]
    if len(records) != steps:
        raise SeriesFormatError(
            f"header declares {steps} records but file has {len(records)}",
            record=len(records) + 1 if len(records) < steps else steps + 1,
        )

    mats, mats2, ncs = [], [], []
    for idx, line in enumerate(records, start=1):
        tokens = line.split()
        try:
            values = np.array([float(t) for t in tokens], dtype=float)
        except ValueError as exc:
            raise SeriesFormatError(f"non-numeric field ({exc})", record=idx) from None
        if kind in ("kernel", "propagator") and values.size == expected + 1:
            t_expected = (idx - 1) * dt
            if not math.isclose(values[0], t_expected, rel_tol=_GRID_RTOL, abs_tol=_GRID_RTOL * dt):
                raise NonUniformGridError(
                    f"time {values[0]!r} is off the uniform grid (expected {t_expected!r})",
                    record=idx,
                )
            values = values[1:]
        if values.size != expected:
            raise DimensionError(
                f"record {idx}: expected {expected} fields for kind={kind} ne={ne}, got {values.size}"
            )
        if kind == "unitary":
            ncs.append(values[0])
            mats.append(_to_complex(values[1:], dim))
        elif kind == "pfi":
            half = expected // 2
            mats.append(_to_complex(values[:half], dim))
            mats2.append(_to_complex(values[half:], dim))
        else:
            mats.append(_to_complex(values, dim))

    empty = np.zeros((0, dim, dim), dtype=complex)
    stack = np.array(mats) if mats else empty
    if kind == "kernel":
        return MemoryKernelSeries(dt, stack)
    if kind == "propagator":
        return PropagatorSeries(dt, stack)
    if kind == "pfi":
        return PfiSeries(dt, stack, np.array(mats2) if mats2 else empty)
    return UnitarySeries(dt, stack, np.array(ncs, dtype=float), ne)
