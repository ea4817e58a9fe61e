"""Print the constant audit table (closed forms against quadrature)."""
from fraccontrol.experiments import constant_audit


def main():
    for r in constant_audit():
        par = ",".join(f"{k}={v}" for k, v in r.params.items())
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<24} {par:<26} "
              f"value={r.value:+.12f} ref={r.reference:+.12f} err={r.error:.1e}")


if __name__ == "__main__":
    main()
