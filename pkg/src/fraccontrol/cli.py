"""Command-line entry point: ``fraccontrol <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .biorthogonal import (BiorthogonalFamily, Multiplier, MultiplierConfig, calibrate_g0,
                           decay_exponent, kronecker_errors)
from .experiments import SweepConfig, constant_audit, cost_sweep
from .simulator import evolve
from .spectrum import FracModel
from .synthesis import ControlSignal, ModalState, min_norm_control, moment_control


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _dump(obj, path: str | None):
    text = json.dumps(obj, indent=2, default=_json_default)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def parse_y0(text: str) -> ModalState:
    """``modal:k`` for phi_k, or a JSON file with "re" (and optionally "im") lists."""
    if text.startswith("modal:"):
        return ModalState.mode(int(text.split(":", 1)[1]))
    data = json.loads(Path(text).read_text())
    re = np.asarray(data["re"], float)
    im = np.asarray(data.get("im", np.zeros_like(re)), float)
    return ModalState(re + 1j * im)


def read_control(path: str) -> ControlSignal:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    t, re, im = rows[:, 0], rows[:, 1], rows[:, 2]
    T = float(t[-1] - t[0])
    if not np.allclose(np.diff(t), T / (t.size - 1), rtol=1e-6, atol=1e-15):
        raise ValueError("control samples must be uniform in time")
    samples = re if not np.any(im) else re + 1j * im
    return ControlSignal(T, samples, float(t[0]))


def write_control(u: ControlSignal, path: Path):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re_u", "im_u"])
        s = u.samples.astype(complex)
        for t, v in zip(u.t, s):
            w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


# ---------------------------------------------------------------- subcommands

def cmd_constants(a):
    alphas = _floats(a.alpha)
    s_list = _floats(a.s)
    rows = constant_audit(s_list, alphas, products=not a.no_products)
    _dump([asdict(r) for r in rows], a.out)
    return 0 if all(r.passed for r in rows) else 1


def cmd_verify(a):
    m = FracModel(a.s, a.model)
    g0 = a.g0 if a.g0 is not None else calibrate_g0(m, a.T, K=a.trunc).g0
    fam = BiorthogonalFamily(m, a.T, g0, K=a.trunc)
    E = kronecker_errors(fam, a.n_max)
    out = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["n"] + [f"k{k}" for k in range(1, a.n_max + 1)])
        for n in range(a.n_max):
            w.writerow([n + 1] + [f"{v:.3e}" for v in E[n]])
    finally:
        if a.out:
            out.close()
    mult = Multiplier(MultiplierConfig.for_model(m, a.T, g0))
    summary = {"max_error": float(E.max()), "g0": g0, "K": a.trunc}
    if a.envelope:
        fit = decay_exponent(mult)
        x = np.linspace(0.0, 50.0 / mult.cfg.b, 101)
        gap = mult.log_H_imag(x) - mult.lower_bound_imag(x)
        summary.update({"decay_exponent": fit.exponent, "decay_target": fit.target,
                        "lower_bound_min_margin": float(gap.min())})
    print(json.dumps(summary), file=sys.stderr)
    return 0 if E.max() <= a.tol else 1


def cmd_synthesize(a):
    m = FracModel(a.s, a.model)
    y0 = parse_y0(a.y0)
    t0 = time.perf_counter()
    manifest = {"s": a.s, "T": a.T, "model": a.model, "y0": a.y0, "method": a.method}
    if a.method == "gramian":
        N = a.N or max(30, y0.n_modes)
        res = min_norm_control(y0, a.T, N, m, grid_size=a.grid_size or 2 ** 19 + 1)
        u = res.control
        manifest.update({"N": N, "log_cost": res.log_cost, "precision": res.precision})
    else:
        if a.g0 is None:
            cal = calibrate_g0(m, a.T, K=a.trunc)
            g0 = cal.g0
            manifest["g0_calibration"] = cal.ladder
        else:
            g0 = a.g0
        res = moment_control(y0, a.T, m, g0=g0, K=a.trunc, grid_size=a.grid_size or 2 ** 16 + 1)
        u = res.control
        manifest.update({"log_cost": res.log_cost, "K": a.trunc})
    manifest.update({k: v for k, v in u.info.items() if k not in manifest})
    manifest["samples"] = int(u.samples.size)
    manifest["seconds"] = time.perf_counter() - t0
    prefix = Path(a.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    write_control(u, prefix.with_suffix(".csv"))
    _dump(manifest, str(prefix.with_suffix(".json")))
    print(json.dumps({"csv": str(prefix.with_suffix(".csv")), "log_cost": manifest["log_cost"]}))
    return 0


def cmd_simulate(a):
    u = read_control(a.control)
    if a.T is not None and not np.isclose(a.T, u.T, rtol=1e-9):
        raise SystemExit(f"control spans {u.T}, but --T {a.T} was given")
    m = FracModel(a.s, a.model)
    rep = evolve(parse_y0(a.y0), u, m, a.n_modes)
    out = rep.as_dict()
    if a.certified_modes:
        out["residual_certified"] = rep.residual_on(range(1, a.certified_modes + 1))
    _dump(out, a.out)
    return 0


def cmd_sweep(a):
    cfg = SweepConfig.from_json(a.config) if a.config else SweepConfig()
    if a.out:
        cfg.output_path = a.out
    res = cost_sweep(cfg)
    _dump(res.as_dict(), a.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fraccontrol",
                                description="Boundary null controls for fractional heat and "
                                            "Schrodinger equations on (0, 1).")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("constants", help="audit closed-form constants against quadrature")
    c.add_argument("--alpha", default="1.2,1.5,2,3,5")
    c.add_argument("--s", default="0.6,0.7,0.75,0.9")
    c.add_argument("--no-products", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("verify-biorthogonal", help="Kronecker error matrix as CSV")
    v.add_argument("--s", type=float, default=0.75)
    v.add_argument("--T", type=float, default=0.3)
    v.add_argument("--model", choices=["heat", "schrodinger"], default="heat")
    v.add_argument("--g0", type=float)
    v.add_argument("--n-max", type=int, default=20)
    v.add_argument("--trunc", type=int, default=2000)
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--envelope", action="store_true", help="also fit the multiplier envelopes")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("synthesize", help="build a null control and write it as CSV + JSON")
    s.add_argument("--s", type=float, required=True)
    s.add_argument("--T", type=float, required=True)
    s.add_argument("--model", choices=["heat", "schrodinger"], default="heat")
    s.add_argument("--y0", default="modal:1")
    s.add_argument("--method", choices=["moment", "gramian"], default="gramian")
    s.add_argument("--N", type=int, help="moment conditions for the Gramian control")
    s.add_argument("--g0", type=float, help="multiplier size (default: calibrated)")
    s.add_argument("--trunc", type=int, default=2000)
    s.add_argument("--grid-size", type=int)
    s.add_argument("--out", default="control")
    s.set_defaults(func=cmd_synthesize)

    m = sub.add_parser("simulate", help="evolve the modal state under a sampled control")
    m.add_argument("--control", required=True)
    m.add_argument("--s", type=float, required=True)
    m.add_argument("--T", type=float)
    m.add_argument("--model", choices=["heat", "schrodinger"], default="heat")
    m.add_argument("--y0", default="modal:1")
    m.add_argument("--n-modes", type=int, default=30)
    m.add_argument("--certified-modes", type=int)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    w = sub.add_parser("cost-sweep", help="cost versus horizon and the scaling fit")
    w.add_argument("--config")
    w.add_argument("--out", help="output stem for the CSV/JSON pair")
    w.add_argument("--json", help="write the result JSON here instead of stdout")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
