class SimbeamError(Exception):
    pass


class ConfigurationError(SimbeamError):
    """
    Raised for malformed configuration files, invariant violations and
    bad command line arguments. `errors` holds (field path, message) pairs
    when the error came out of model validation.
    """

    def __init__(self, message: str, errors=None):
        self.errors = list(errors or [])
        super().__init__(message)

    @classmethod
    def from_validation(cls, exc, prefix: str = ''):
        errors = []
        for err in exc.errors():
            path = '.'.join(str(x) for x in err['loc'] if x != '__root__')
            if prefix:
                path = f"{prefix}.{path}" if path else prefix
            errors.append((path or '<root>', err['msg']))

        lines = '\n'.join(f"  {path}: {msg}" for path, msg in errors)
        return cls(f"invalid configuration\n{lines}", errors=errors)


class DomainError(SimbeamError):
    pass


class ContractError(SimbeamError):
    pass


class ModelError(SimbeamError):
    pass


class OutputError(SimbeamError):
    pass
