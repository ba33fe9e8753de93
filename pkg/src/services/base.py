import logging
from abc import ABC, abstractmethod
from typing import Any, Dict


class BaseService(ABC):
    """Base class for all services attached to a NetworkTwin"""

    def __init__(self):
        self.name = self.__class__.__name__
        self.logger = logging.getLogger(f"{self.__module__}.{self.name}")
        self.config: Dict = {}

    def configure(self, config: Dict) -> None:
        """Merge runtime configuration (tool defaults, grid sizes, ...)"""
        self.config.update(config)

    @abstractmethod
    def execute(self, data: Dict, **kwargs) -> Any:
        """
        Execute the service on a twin's data
        Args:
            data: twin data with the loaded layers
            kwargs: service-specific parameters
        Returns:
            Service result (a report, a trajectory, result rows)
        """
        pass
