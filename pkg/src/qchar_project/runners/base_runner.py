from abc import ABC, abstractmethod

from qchar_project.config import settings


class QCharBaseRunner(ABC):
    def __init__(self, name, role, config=None, ledger=None):
        self.name = name
        self.role = role
        self.config = (config or settings.RunConfig.from_env()).validate()
        self.ledger = ledger
        self.status = "standby"

    @abstractmethod
    def process_request(self, message):
        """Process incoming requests - must be implemented by specific runners"""

    def update_status(self, status):
        """Update the runner's status"""
        self.status = status
        return {"status": "updated", "new_status": status}

    def get_status(self):
        """Return current status"""
        return self.status
