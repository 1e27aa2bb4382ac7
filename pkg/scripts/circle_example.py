"""Eight points on a circle of radius 0.4 under the distance-function filtration."""
import numpy as np

from _common import parser, save, setup
from cdpersistence.pipeline import RunConfig, diagram_for
from cdpersistence.pointcloud import EmpiricalMeasure, circle_points


def main():
    p = parser(__doc__)
    p.add_argument("--resolution", type=int, default=250)
    args = p.parse_args()
    out = setup(args)
    cloud = EmpiricalMeasure.uniform(circle_points(8, 0.4))
    dgm, _ = diagram_for(cloud, RunConfig(kind="distance-function", resolution=args.resolution, max_degree=1))
    save(dgm, out, "circle8", "8 points on a circle, distance function")
    for q in (0, 1):
        iv = dgm[q][np.argsort(dgm[q][:, 0] - dgm[q][:, 1], kind="stable")][:8]
        print(f"H{q} most persistent:", ", ".join(f"[{b:.4f}, {d:.4f})" for b, d in iv))


if __name__ == "__main__":
    main()
