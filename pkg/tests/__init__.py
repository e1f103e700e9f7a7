"""uavcov test suite."""
