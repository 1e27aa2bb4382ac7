"""Five intervals in 1D: significant H0 count for several degrees."""
from _common import parser, save, setup
from cdpersistence.persistence import significant_count
from cdpersistence.pipeline import RunConfig, diagram_for
from cdpersistence.pointcloud import sample_shape
from cdpersistence.presets import five_intervals


def main():
    p = parser(__doc__)
    p.add_argument("--degrees", type=int, nargs="+", default=[4, 8, 12])
    p.add_argument("--count", type=int, default=500)
    args = p.parse_args()
    out = setup(args)
    cloud = sample_shape(five_intervals(args.count, args.seed))
    for d in args.degrees:
        dgm, _ = diagram_for(cloud, RunConfig(degree=d, resolution=250))
        save(dgm, out, f"five_intervals_d{d}", f"five intervals, d={d}")
        print(f"d={d:>2}: {len(dgm[0])} H0 intervals, {significant_count(dgm, 0)} significant")


if __name__ == "__main__":
    main()
