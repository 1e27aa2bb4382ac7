"""Bottleneck distance between diagrams at consecutive grid resolutions (three-shapes cloud)."""
import json

from _common import parser, setup
from cdpersistence.pipeline import RunConfig, cmd_resolution_sweep
from cdpersistence.presets import three_shapes


def main():
    p = parser(__doc__)
    p.add_argument("--start", type=int, default=50)
    p.add_argument("--stop", type=int, default=250)
    p.add_argument("--step", type=int, default=10)
    p.add_argument("--degree", type=int, default=12)
    args = p.parse_args()
    out = setup(args)
    cfg = RunConfig(input=three_shapes(seed=args.seed).to_dict(), degree=args.degree)
    report = cmd_resolution_sweep(cfg, range(args.start, args.stop + 1, args.step))
    deltas = report.statistics["deltas"]
    (out / "resolution_sweep.json").write_text(json.dumps(deltas, indent=1))
    for e in deltas:
        print(f"m {e['from']:>4} -> {e['to']:>4}: " + "  ".join(f"H{p}={v:.3e}" for p, v in e["bottleneck"].items()))


if __name__ == "__main__":
    main()
