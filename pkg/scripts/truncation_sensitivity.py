"""How the fitted exponent depends on the truncation rule lambda_N T >= level."""
import argparse

from fraccontrol.experiments import SweepConfig, cost_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--s", type=float, default=0.75)
    p.add_argument("--levels", default="36.84,300,3000,30000")
    a = p.parse_args()
    print("level      N range       tau_hat  rho_hat  ratio(1.25/2)")
    for lv in (float(v) for v in a.levels.split(",")):
        res = cost_sweep(SweepConfig(s=a.s, level=lv))
        f = res.fit
        Ns = [r.N for r in res.rows]
        print(f"{lv:<10g} {min(Ns):>4}-{max(Ns):<8} {f.tau_hat:7.3f}  {f.rho_hat:7.4f}  "
              f"{f.residual_at(1.25) / f.residual_at(2.0):8.2f}")


if __name__ == "__main__":
    main()
