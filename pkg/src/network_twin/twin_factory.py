import logging
from typing import Dict, Optional, Sequence

import numpy as np

from src.errors import NotStronglyConnected, SyncNetError
from src.network.graph import is_strongly_connected, rescale_layers, validate_coupling
from src.network_twin.core import LayerEntry, NetworkTwin
from src.numerics.linalg import as_dense_matrix
from src.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)


class TwinFactory:
    """Builds NetworkTwin instances from matrices or run configs"""

    def _get_service_module_mapping(self) -> Dict[str, str]:
        """
        Returns a mapping of service names to their module paths
        """
        return {
            "AnalysisService": "src.services.analysis_service",
            "ControlService": "src.services.analysis_service",
            "CheckService": "src.services.analysis_service",
            "SimulationService": "src.services.simulation_service",
            "ConjectureService": "src.services.conjecture_service",
        }

    def _load_service(self, service_name: str, service_config: Dict = None):
        module_mapping = self._get_service_module_mapping()
        if service_name not in module_mapping:
            raise ValueError(f"Service {service_name} not configured in module mapping")

        module_name = module_mapping[service_name]
        try:
            service_module = __import__(module_name, fromlist=[service_name])
            service_class = getattr(service_module, service_name)
        except (ImportError, AttributeError) as e:
            raise ValueError(
                f"Failed to load service {service_name} from module {module_name}: {str(e)}"
            )

        service = service_class()
        if hasattr(service, "configure") and service_config:
            service.configure(service_config)
        return service

    def _build_layer(
        self, index: int, matrix, gamma: Optional[Sequence[float]], strict: bool
    ) -> LayerEntry:
        raw = as_dense_matrix(matrix)
        entry = LayerEntry(
            index=index,
            raw=raw,
            gamma=None if gamma is None else np.asarray(gamma, dtype=np.float64),
        )
        try:
            coupling = validate_coupling(raw)
            if not is_strongly_connected(coupling):
                raise NotStronglyConnected(f"Layer {index} is not strongly connected")
            entry.coupling = coupling
        except SyncNetError as e:
            if strict:
                raise
            logger.warning(f"Layer {index} rejected: {str(e)}")
            entry.error = e
        return entry

    def create_twin(
        self,
        matrices: Sequence,
        gammas: Optional[Sequence[Sequence[float]]] = None,
        services: Sequence[str] = (),
        service_config: Dict = None,
        strict: bool = True,
        name: str = "network",
        layer_ids: Optional[Sequence[int]] = None,
    ) -> NetworkTwin:
        """
        Create a NetworkTwin from raw coupling matrices

        Args:
            matrices: one square matrix per layer
            gammas: optional inner-matrix diagonals, one per layer
            services: names of services to attach
            service_config: optional configuration passed to each service
            strict: raise on the first invalid layer instead of recording it
            layer_ids: layer numbers to report instead of 0..M-1, for layer subsets
        """
        if layer_ids is not None and len(layer_ids) != len(matrices):
            raise ValueError(f"Got {len(layer_ids)} layer ids for {len(matrices)} matrices")
        twin = NetworkTwin(name=name)
        for position, matrix in enumerate(matrices):
            gamma = gammas[position] if gammas is not None else None
            index = layer_ids[position] if layer_ids is not None else position
            twin.add_layer(self._build_layer(index, matrix, gamma, strict))

        for service_name in services:
            twin.add_service(self._load_service(service_name, service_config))

        logger.info(
            f"Created twin '{name}' with {len(twin.layers)} layers, "
            f"services: {twin.list_services()}"
        )
        return twin

    def create_twin_from_config(
        self,
        config: RunConfig,
        services: Sequence[str] = (),
        service_config: Dict = None,
        strict: bool = True,
        layer_ids: Optional[Sequence[int]] = None,
    ) -> NetworkTwin:
        """Create a twin from a run config, folding layer strengths into the matrices"""
        twin = self.create_twin(
            [layer.matrix for layer in config.layers],
            gammas=[layer.gamma for layer in config.layers],
            services=services,
            service_config=service_config,
            strict=strict,
            name="run-config",
            layer_ids=layer_ids,
        )
        strengths = [layer.strength for layer in config.layers]
        if any(s != strengths[0] for s in strengths) and all(e.valid for e in twin.layers):
            scaled = rescale_layers([entry.coupling for entry in twin.layers], strengths)
            for entry, coupling in zip(twin.layers, scaled):
                entry.coupling = coupling
                entry.raw = coupling.m
        return twin
