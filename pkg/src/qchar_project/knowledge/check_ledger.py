class CheckLedger:
    def __init__(self):
        """
        Initializes the ledger with empty verdict and event stores.
        """
        self.verdicts = {}
        self.details = {}
        self.events = []

    def record(self, name, anchor, passed, details=None):
        """
        Records the outcome of one verification check.

        Args:
            name (str): Check identifier (e.g., "decomposition").
            anchor (str): Short tag of the result being verified.
            passed (bool): Whether every assertion of the check held.
            details (dict): Report produced by the check.

        Returns:
            dict: The recorded event.
        """
        event = {
            "name": name,
            "anchor": anchor,
            "passed": bool(passed),
            "details": details or {},
        }
        self.verdicts[name] = event["passed"]
        self.details[name] = event["details"]
        self.events.append(event)
        return event

    def query(self, name):
        """
        Retrieves the latest verdict of a check.

        Args:
            name (str): Check identifier.

        Returns:
            bool: The latest verdict, or None if the check never ran.
        """
        return self.verdicts.get(name)

    def query_details(self, name):
        """
        Retrieves the latest report of a check.

        Args:
            name (str): Check identifier.

        Returns:
            dict: The report or an empty dictionary if not found.
        """
        return self.details.get(name, {})

    def history(self):
        """
        Retrieves every recorded event in order.

        Returns:
            list: A list of recorded check events.
        """
        return self.events

    def summary(self):
        """
        Summarizes the latest verdicts.

        Returns:
            dict: ``total``, ``passed``, ``failed`` (names) and ``all_passed``.
        """
        failed = sorted(name for name, ok in self.verdicts.items() if not ok)
        return {
            "total": len(self.verdicts),
            "passed": len(self.verdicts) - len(failed),
            "failed": failed,
            "all_passed": not failed,
        }
