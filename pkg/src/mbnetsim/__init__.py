"""Multi-band flexible-grid optical network simulator.

C and L bands carry working traffic; the S band is reserved for shared
backup paths that are set up only for lightpaths whose availability falls
below a threshold.
"""

from mbnetsim.bands import BAND_CAPACITY, Band, band_capacity
from mbnetsim.topology import Network, NetworkView, load_topology, remove_edges

__all__ = [
    "BAND_CAPACITY",
    "Band",
    "Network",
    "NetworkView",
    "band_capacity",
    "load_topology",
    "remove_edges",
]

__version__ = "0.1.0"
