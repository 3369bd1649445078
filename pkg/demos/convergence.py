"""Sampling three disks and recovering the distances between them.

The disks sit at prescribed gaps; as the sample grows, the single-linkage
ultrametric of the sample approaches the three-point component space, and
the distortion stays under twice the covering radius.
"""

from funclust.convergence import component_space, convergence_experiment, sample_shape

SPEC = "disks3:w13=4,w23=6,w12=11,radius=1"
A = component_space(sample_shape(SPEC, 30, 0))
print("component distances:", {(a, b): A.d(a, b) for a, b in ((1, 2), (1, 3), (2, 3))})
print(f"{'n':>5} {'R':>8} {'distortion':>11} {'2R':>8}  ok")
for row in convergence_experiment(SPEC, [30, 60, 120, 240, 480], [0]):
    print(f"{row.n:5d} {row.R:8.4f} {row.distortion:11.4f} {2 * row.R:8.4f}  {row.passed}")
