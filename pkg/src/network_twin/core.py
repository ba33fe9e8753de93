from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.errors import SyncNetError
from src.network.graph import CouplingMatrix


@dataclass
class LayerEntry:
    """One coupling layer as loaded, valid or not"""

    index: int
    raw: np.ndarray = field(repr=False)
    gamma: Optional[np.ndarray] = field(default=None, repr=False)
    coupling: Optional[CouplingMatrix] = None
    error: Optional[SyncNetError] = None

    @property
    def valid(self) -> bool:
        return self.coupling is not None and self.error is None

    @property
    def nodes(self) -> int:
        return int(self.raw.shape[0])


class NetworkTwin:
    """A multi-weighted network together with the services attached to it"""

    def __init__(self, name: str = "network"):
        self.name = name
        self.layers: List[LayerEntry] = []
        self.active_services: Dict = {}  # service_name -> service_instance

    def add_layer(self, entry: LayerEntry) -> None:
        self.layers.append(entry)

    def valid_layers(self) -> List[LayerEntry]:
        return [layer for layer in self.layers if layer.valid]

    def add_service(self, service):
        """Attach a service (class or instance)"""
        if isinstance(service, type):
            service = service()
        self.active_services[service.name] = service

    def list_services(self):
        return list(self.active_services.keys())

    def get_data(self) -> Dict:
        return {"name": self.name, "layers": self.layers}

    def execute_service(self, service_name: str, **kwargs):
        """Execute a named service on this network"""
        if service_name not in self.active_services:
            raise ValueError(f"Service {service_name} not found")

        service = self.active_services[service_name]
        return service.execute(self.get_data(), **kwargs)
