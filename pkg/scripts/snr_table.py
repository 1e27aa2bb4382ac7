"""Median H1 signal-to-noise ratios for the noisy cube skeleton (reduced scale by default)."""
from _common import parser, setup
from cdpersistence.pipeline import cmd_snr_table
from cdpersistence.presets import cube_skeleton


def main():
    p = parser(__doc__)
    p.add_argument("--degrees", type=int, nargs="+", default=[6])
    p.add_argument("--noise", type=int, nargs="+", default=[0, 25, 250])
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--full", action="store_true", help="degrees 6 8 10, all noise levels, 100 trials")
    args = p.parse_args()
    out = setup(args)
    if args.full:
        args.degrees, args.noise, args.trials = [6, 8, 10], [0, 25, 50, 100, 250, 500, 1000], 100
    table = cmd_snr_table(cube_skeleton(), args.degrees, args.noise, args.trials, resolution=50, seed=args.seed,
                          progress=lambda meth, M, t, r: print(f"  {meth} M={M} trial {t}: {r:.3g}", flush=True)
                          if args.verbose else None)
    text = table.to_csv()
    (out / "snr_table.csv").write_text(text)
    print(text, end="")


if __name__ == "__main__":
    main()
