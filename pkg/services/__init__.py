# Coverage engines. Only the dependency-free kernels are re-exported here;
# import the engines from their modules (services.analytic, services.montecarlo, ...).
from .special_functions import (
    NakagamiParams,
    db_to_linear,
    dbm_to_watt,
    linear_to_db,
    nakagami_ccdf,
    nakagami_cdf,
    nakagami_sample,
    regularized_lower_gamma,
    regularized_upper_gamma,
    watt_to_dbm,
)

__all__ = [
    "NakagamiParams",
    "db_to_linear",
    "dbm_to_watt",
    "linear_to_db",
    "nakagami_ccdf",
    "nakagami_cdf",
    "nakagami_sample",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
    "watt_to_dbm",
]
