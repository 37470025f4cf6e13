#!/usr/bin/env python3
"""
Toeplitz Reaction-Diffusion Verifier

Command-line front-end for the spectral, invariant-region, Lyapunov and simulation tooling of
m-component reaction-diffusion systems with a tridiagonal symmetric Toeplitz diffusion matrix.

Subcommands:
1. spectrum: closed-form eigenvalues and the parabolicity verdict
2. regions: enumerate the 2^m invariant regions or audit data against them
3. certify: search and certify the Lyapunov weights theta
4. simulate: run a configured simulation and write the monitor CSV
5. verify-all: run the acceptance suite
6. demo-config: write a ready-to-run configuration

Exit codes: 0 ok, 1 condition/certification failure, 2 invalid input or failed precondition,
3 blow-up.
"""

import os
import sys
import argparse
import logging
from pathlib import Path

from pydantic import ValidationError

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from src.cli.run_config import load_config, write_demo_config
from src.lyapunov import LyapunovConfig, check_condition, make_certificate, theta_search, write_certificate
from src.lyapunov.condition import format_certificate
from src.regions import accepting_regions, boundary_compat, enumerate_regions, membership
from src.simulate import cross_check, run
from src.spectral import ToeplitzSystem, decompose
from src.utils.errors import ConditionNotSatisfied, InvalidInputError, PreconditionError
from src.utils.settings import load_settings

EXIT_OK = 0
EXIT_CONDITION = 1
EXIT_INVALID = 2
EXIT_BLOWUP = 3

logger = logging.getLogger(__name__)


def setup_logging(level=logging.INFO):
    """Setup logging configuration."""
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stdout)
        ]
    )


def _system(args) -> ToeplitzSystem:
    return ToeplitzSystem(m=args.m, a=args.a, b=args.b)


def cmd_spectrum(args, settings):
    """Print lambda (natural order), lambda_bar (ascending) and the parabolicity verdict."""
    sys_ = _system(args)
    dec = decompose(sys_)

    print(f"Toeplitz spectrum: m={sys_.m}, a={sys_.a}, b={sys_.b}")
    print("=" * 50)
    print(f"{'l':>4} {'lambda_l':>20} {'lambda_bar_l':>20}")
    for ell in range(sys_.m):
        print(f"{ell + 1:>4} {dec.lambdas[ell]:>20.12g} {dec.lambdas_bar[ell]:>20.12g}")
    print("=" * 50)

    if sys_.parabolic:
        print("Verdict: PARABOLIC")
        return EXIT_OK
    print("Verdict: NOT PARABOLIC (2b cos(pi/(m+1)) >= a)")
    return EXIT_CONDITION


def cmd_regions(args, settings):
    """List regions, or report membership / boundary compatibility of U0 and beta in each."""
    regions = enumerate_regions(args.m)
    if args.u0 is None and args.beta is None:
        print(f"{len(regions)} invariant regions for m={args.m}:")
        for index, spec in enumerate(regions, start=1):
            print(f"  {index:>4}. {spec.label()}")
        return EXIT_OK

    if args.a is None or args.b is None:
        raise InvalidInputError("auditing data needs -a and -b")
    dec = decompose(_system(args))
    tol = settings.membership_tol

    print(f"Region audit: m={args.m}, a={args.a}, b={args.b}, tol={tol:g}")
    print("=" * 60)
    for spec in regions:
        parts = [f"{spec.label():<30}"]
        if args.u0 is not None:
            check = membership(spec, dec, args.u0, tol)
            parts.append(f"U0 {'inside ' if check else 'outside'}")
        if args.beta is not None:
            check = boundary_compat(spec, dec, args.beta, tol)
            parts.append(f"beta {'compatible' if check else 'incompatible'}")
        print("  ".join(parts))

    if args.u0 is not None:
        accepted = accepting_regions(dec, args.u0, tol)
        print(f"\nU0 lies in {len(accepted)} of {len(regions)} regions")
    return EXIT_OK


def cmd_certify(args, settings):
    """Find (or check given) thetas and write the audit certificate."""
    sys_ = _system(args)
    dec = decompose(sys_)
    if not sys_.parabolic:
        raise PreconditionError("parabolicity failed", f"m={sys_.m}, a={sys_.a}, b={sys_.b}")

    if args.theta:
        cfg = LyapunovConfig(p_m=args.p, thetas=tuple(args.theta))
        report = check_condition(dec, cfg)
        if not report:
            raise ConditionNotSatisfied(
                f"condition fails at tuple {report.failing_tuple}, l={report.failing_l}",
                tightest_margin=report.failing_value,
                best_thetas=cfg.thetas,
            )
    else:
        cfg = theta_search(dec, args.p, budget=args.budget)

    cert = make_certificate(sys_, dec, cfg)
    output = args.output or os.path.join(settings.output_dir, f"certificate_m{sys_.m}_p{cfg.p_m}.txt")
    os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)
    write_certificate(cert, output)

    print(format_certificate(cert), end="")
    print(f"✅ Certificate written to {output}")
    return EXIT_OK


def cmd_simulate(args, settings):
    """Validate preconditions, run the configured simulation and write the CSV."""
    run_config = load_config(args.config)
    config = run_config.build(settings)

    print("Toeplitz RD simulation")
    print("=" * 50)
    print(f"System: m={config.system.m}, a={config.system.a}, b={config.system.b}")
    print(f"Region: {config.region.label()}")
    print(f"Boundary: {', '.join(config.boundary.kinds)}")
    print(f"Lyapunov: p_m={config.lyapunov.p_m}, theta={[round(t, 6) for t in config.lyapunov.thetas]}")
    print(f"Mesh: X={config.mesh.X:g}, n_cells={config.mesh.n_cells}; T_final={config.T_final:g}")
    for report in run_config.assumption_reports(settings, config.reaction):
        status = "ok" if report else "VIOLATED"
        print(f"{report.name}: worst margin {report.worst_margin:.3e} over {report.n_samples} samples ({status})")
    if not run_config.reaction.D:
        print("A3 balance: not sampled (no reaction.D)")
    print("=" * 50)

    result = run(config)
    output = args.output or os.path.join(settings.output_dir, Path(args.config).stem + ".csv")
    os.makedirs(os.path.dirname(os.path.abspath(output)), exist_ok=True)
    result.write_csv(output)

    print(f"\nSteps: {len(result.t) - 1}, final t={result.final_state.t:.6g}")
    print(f"Min signed w: {result.min_signed:.3e}")
    print(f"Gronwall pair: C6={result.gronwall.C6:.6g}, C8={result.gronwall.C8:.6g} "
          f"(holds={result.gronwall.holds})")
    print(f"Corollary ratio: {result.corollary:.6g}")

    if args.cross_check:
        report = cross_check(config)
        print(f"Cross-check u vs w: discrepancy {report.discrepancy:.3e} ({'ok' if report else 'FAILED'})")

    print(f"CSV written to {output}")
    if result.blow_up:
        print(f"❌ Blow-up detected: T_max ≈ {result.t_max:.6g}")
        return EXIT_BLOWUP
    print("✅ Run completed without blow-up")
    return EXIT_OK


def cmd_verify_all(args, settings):
    """Run the acceptance suite; exit 0 iff every check passes."""
    from src.verification.acceptance import run_all

    results = run_all(seed=args.seed)
    print("\n" + "=" * 60)
    print("ACCEPTANCE SUMMARY")
    print("=" * 60)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<36} {r.seconds:6.1f}s  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"\nPassed: {len(results) - len(failed)}/{len(results)}")
    return EXIT_OK if not failed else EXIT_CONDITION


def cmd_demo_config(args, settings):
    path = write_demo_config(args.output, kind=args.kind)
    print(f"Demo config written to {path}")
    print(f"Run it with: python main.py simulate --config {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        description='Toeplitz Reaction-Diffusion Verifier',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Spectrum and parabolicity
  python main.py spectrum -m 2 -a 3 -b 1

  # Region audit of initial and boundary data
  python main.py regions -m 2 -a 3 -b 1 --u0 2 1 --beta 1 0

  # Certify Lyapunov weights
  python main.py certify -m 3 -a 2 -b 0.5 -p 3

  # Simulate a demo configuration
  python main.py demo-config --output runs/demo.cfg
  python main.py simulate --config runs/demo.cfg --cross-check

  # Full acceptance suite
  python main.py verify-all
        """
    )

    subparsers = parser.add_subparsers(dest='mode', help='Operation mode')

    def add_system(p, required=True):
        p.add_argument('-m', type=int, required=True, help='Number of components (m >= 2)')
        p.add_argument('-a', type=float, required=required, help='Diagonal entry of A (a > 0)')
        p.add_argument('-b', type=float, required=required, help='Off-diagonal entry of A (b > 0)')

    spectrum_parser = subparsers.add_parser('spectrum', help='Print eigenvalues and parabolicity verdict')
    add_system(spectrum_parser)

    regions_parser = subparsers.add_parser('regions', help='Enumerate or audit invariant regions')
    add_system(regions_parser, required=False)
    regions_parser.add_argument('--u0', nargs='+', type=float, help='Initial state U0 (m values)')
    regions_parser.add_argument('--beta', nargs='+', type=float, help='Boundary data beta (m values)')

    certify_parser = subparsers.add_parser('certify', help='Certify Lyapunov weights theta')
    add_system(certify_parser)
    certify_parser.add_argument('-p', type=int, default=2, help='Degree p_m of H (default: 2)')
    certify_parser.add_argument('--theta', nargs='+', type=float,
                                help='Check these thetas instead of searching')
    certify_parser.add_argument('--budget', type=int, default=200_000,
                                help='Maximum theta candidates screened (default: 200000)')
    certify_parser.add_argument('--output', help='Certificate path (default: <output_dir>/certificate_m<m>_p<p>.txt)')

    simulate_parser = subparsers.add_parser('simulate', help='Run a configured simulation')
    simulate_parser.add_argument('--config', required=True, help='Run configuration file')
    simulate_parser.add_argument('--output', help='CSV path (default: <output_dir>/<config stem>.csv)')
    simulate_parser.add_argument('--cross-check', action='store_true',
                                 help='Also integrate in u-coordinates and report the discrepancy')

    verify_parser = subparsers.add_parser('verify-all', help='Run the acceptance suite')
    verify_parser.add_argument('--seed', type=int, default=0, help='Base seed (default: 0)')

    demo_parser = subparsers.add_parser('demo-config', help='Write a ready-to-run configuration')
    demo_parser.add_argument('--output', default='demo.cfg', help='Config path (default: demo.cfg)')
    demo_parser.add_argument('--kind', choices=['builtin', 'blowup'], default='builtin',
                             help='builtin family or the blow-up control (default: builtin)')

    parser.add_argument('--verbose', '-v', action='store_true',
                        help='Enable verbose logging')
    return parser


COMMANDS = {
    'spectrum': cmd_spectrum,
    'regions': cmd_regions,
    'certify': cmd_certify,
    'simulate': cmd_simulate,
    'verify-all': cmd_verify_all,
    'demo-config': cmd_demo_config,
}


def main(argv=None):
    """Main entry point with argument parsing; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.mode:
        parser.print_help()
        return EXIT_INVALID

    try:
        settings = load_settings()
    except ValidationError as e:
        print(f"❌ Invalid environment settings: {e}", file=sys.stderr)
        return EXIT_INVALID
    log_level = logging.DEBUG if args.verbose else getattr(logging, settings.log_level.upper(), logging.INFO)
    setup_logging(log_level)

    try:
        return COMMANDS[args.mode](args, settings)
    except ConditionNotSatisfied as e:
        print(f"❌ Condition not satisfied: {e} (tightest margin {e.tightest_margin:.3e}, "
              f"best theta {e.best_thetas})", file=sys.stderr)
        return EXIT_CONDITION
    except PreconditionError as e:
        print(f"❌ abort: {e}", file=sys.stderr)
        return EXIT_CONDITION if e.reason == "lyapunov condition failed" else EXIT_INVALID
    except (InvalidInputError, ValidationError) as e:
        print(f"❌ Invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
