from .check_ledger import CheckLedger

__all__ = ["CheckLedger"]
