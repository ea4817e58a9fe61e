"""Heat (or Schrodinger) cost sweep with the scaling fit; writes results/<stem>.{csv,json}."""
import argparse

from fraccontrol.experiments import SweepConfig, cost_sweep, horizons_for


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--s", type=float, default=0.75)
    p.add_argument("--model", default="heat")
    p.add_argument("--level", type=float, default=3000.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--auto-horizons", action="store_true",
                   help="pick T so that mu_s/T^tau spans 2.5..40 (default list otherwise)")
    p.add_argument("--out", default="results/cost_sweep")
    a = p.parse_args()
    extra = {"T_list": horizons_for(a.s, a.model), "dps": 80} if a.auto_horizons else {}
    res = cost_sweep(SweepConfig(s=a.s, model=a.model, level=a.level, workers=a.workers,
                                 output_path=a.out, **extra))
    for r in res.rows:
        print(f"T={r.T:<5} N={r.N:<4} log cost={r.log_cost:9.4f} margin={r.margin:8.3f}")
    f = res.fit
    print(f"tau_hat={f.tau_hat:.3f} rho_hat={f.rho_hat:.4f} "
          f"residual(1.25)/residual(2)={f.residual_at(1.25) / f.residual_at(2.0):.2f} "
          f"bracket constant={res.bracket_constant:.4f}")


if __name__ == "__main__":
    main()
