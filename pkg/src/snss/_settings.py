"""Parameter tables of the six latent-field simulation settings (version 1).

Triples are (variance, shape nu, range phi). Index order is
``[component][cluster]`` with components z1..z3 and clusters 1..3.
"""

TABLE_VERSION = 1

# Per-cluster variances of white-noise setting 1: WHITE_NOISE_VAR[cluster][component]
WHITE_NOISE_VAR = (
    (1.0, 3.0, 2.0),
    (2.0, 4.0, 2.0),
    (1.0, 3.0, 5.0),
)

# Clustered Matern fields of settings 2 and 4 (unit variance).
CLUSTER_MATERN = (
    ((1.0, 0.5, 0.5), (1.0, 1.0, 1.0), (1.0, 1.0, 2.0)),
    ((1.0, 1.5, 2.7), (1.0, 0.7, 1.0), (1.0, 1.2, 1.9)),
    ((1.0, 1.2, 1.4), (1.0, 0.5, 3.0), (1.0, 0.7, 0.7)),
)

# Stationary Matern fields of setting 6, one triple per component.
STATIONARY_MATERN = (
    (1.0, 0.5, 1.0),
    (1.0, 1.0, 1.5),
    (1.0, 1.5, 2.0),
)
