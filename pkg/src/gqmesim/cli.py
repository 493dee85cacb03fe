"""Command-line entry point: ``gqmesim <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .circuit.emulator import run_statevector, sample_shots, write_histogram
from .circuit.gates import read_circuit, write_circuit
from .circuit.transpile import transpile
from .errors import GqmeError, ValidationError
from .gqme import propagate_gqme, sigma_z_curve
from .kraus import evolve_kraus_circuit
from .pipeline import dilate_series, load_config, load_kernel, oracle_kernel, run_pipeline
from .series import PropagatorSeries, UnitarySeries, read_series, write_series
from .spinboson import projected_liouvillian

log = logging.getLogger("gqmesim")


def _config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )


def _config(args):
    return load_config(args.config, args.overrides)


def cmd_kernel_gen(args) -> None:
    cfg = _config(args)
    pfis, kernel = oracle_kernel(cfg.params(), cfg.fock_dim, cfg.steps, cfg.discretization)
    write_series(kernel, args.out)
    if args.pfi_out:
        write_series(pfis, args.pfi_out)
    log.info("wrote %d kernel records to %s", kernel.steps, args.out)


def cmd_gqme_propagate(args) -> None:
    cfg = _config(args)
    params = cfg.params()
    kernel = load_kernel(args.kernel, params)
    steps = args.steps if args.steps is not None else kernel.steps
    prop = propagate_gqme(projected_liouvillian(params), kernel, steps)
    write_series(prop, args.out)
    if args.sigma_z:
        sz = sigma_z_curve(prop)
        with open(args.sigma_z, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "t", "sigma_z"])
            for n, (t, s) in enumerate(zip(prop.times, sz)):
                w.writerow([n, repr(float(t)), repr(float(s))])


def cmd_dilate(args) -> None:
    prop = read_series(args.propagator)
    if not isinstance(prop, PropagatorSeries):
        raise ValidationError(f"{args.propagator}: expected kind=propagator, got kind={prop.kind}")
    steps = np.arange(0, prop.steps, args.stride)
    write_series(dilate_series(prop, steps, args.global_nc), args.out)


def cmd_transpile(args) -> None:
    series = read_series(args.unitaries)
    if not isinstance(series, UnitarySeries):
        raise ValidationError(f"{args.unitaries}: expected kind=unitary, got kind={series.kind}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    picks = range(series.steps) if args.record is None else [args.record]
    for i in picks:
        if not 0 <= i < series.steps:
            raise ValidationError(f"record {i} outside 0..{series.steps - 1}")
        seq = transpile(series.unitaries[i])
        write_circuit(seq, out / f"record_{i:05d}.qc")
        c = seq.counts()
        print(f"record {i}: RZ={c['RZ']} SX={c['SX']} CX={c['CX']}")


def cmd_emulate(args) -> None:
    seq = read_circuit(args.circuit)
    state = np.zeros(2**seq.n_qubits, dtype=complex)
    state[args.input_index] = 1.0
    amps = run_statevector(seq, state)
    hist = sample_shots(amps, args.shots, args.seed)
    if args.out:
        write_histogram(hist, args.out)
    else:
        print("basis_index,count")
        for idx in sorted(hist.counts):
            print(f"{idx},{hist.counts[idx]}")


def cmd_pipeline(args) -> None:
    cfg = _config(args)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.output_dir is not None:
        cfg.output_dir = args.output_dir
    res = run_pipeline(cfg)
    dev = np.max(np.abs(res.sigma_z_emulated - res.sigma_z_classical))
    print(f"wrote {res.output_dir / 'sigma_z.csv'} ({len(res.steps)} rows, max |emulated - classical| = {dev:.3e})")


def cmd_kraus_demo(args) -> None:
    rho0 = np.array([[1, 1], [1, 3]], dtype=complex) / 4
    n = int(round(args.t_max / args.dt)) + 1
    fh = open(args.out, "w", newline="", encoding="ascii") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "rho00", "rho11"])
        for k in range(n):
            t = k * args.dt
            r00, r11 = evolve_kraus_circuit(rho0, args.gamma, t, args.shots, args.seed)
            w.writerow([repr(t), repr(r00), repr(r11)])
    finally:
        if fh is not sys.stdout:
            fh.close()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gqmesim", description="GQME dynamics on an emulated quantum circuit")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-gen", help="memory kernel from exact-diagonalization PFIs")
    _config_args(p)
    p.add_argument("--out", required=True)
    p.add_argument("--pfi-out")
    p.set_defaults(func=cmd_kernel_gen)

    p = sub.add_parser("gqme-propagate", help="propagate G(t) from a kernel or pfi series")
    _config_args(p)
    p.add_argument("--kernel", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--sigma-z", help="also write step,t,sigma_z CSV here")
    p.set_defaults(func=cmd_gqme_propagate)

    p = sub.add_parser("dilate", help="dilate a propagator series to unitaries")
    p.add_argument("--propagator", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--global-nc", action="store_true", help="one n_c for all steps")
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("transpile", help="compile unitaries to RZ/SX/CX circuits")
    p.add_argument("--unitaries", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--record", type=int, help="0-based record; all records if omitted")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("emulate", help="run a circuit file and sample shots")
    p.add_argument("--circuit", required=True)
    p.add_argument("--shots", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input-index", type=int, default=0)
    p.add_argument("--out", help="histogram CSV; stdout if omitted")
    p.set_defaults(func=cmd_emulate)

    p = sub.add_parser("pipeline", help="kernel -> propagator -> circuits -> sigma_z.csv")
    _config_args(p)
    p.add_argument("--jobs", type=int)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("kraus-demo", help="amplitude damping through 2-dilation circuits")
    p.add_argument("--gamma", type=float, default=1.52e9, help="decay rate in 1/s")
    p.add_argument("--t-max", type=float, default=1e-9, help="seconds")
    p.add_argument("--dt", type=float, default=1e-11, help="seconds")
    p.add_argument("--shots", type=int, help="omit for exact readout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_kraus_demo)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except (GqmeError, OSError, ValueError) as exc:
        msg = {"error": type(exc).__name__, "stage": args.command, "message": str(exc)}
        print(json.dumps(msg), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
