from typing import Optional, Union


class GenericPolarDpError(Exception):
    __field: Optional[str] = None

    def __init__(self, msg: Optional[Union[str, dict]] = None, field: Optional[str] = None) -> None:
        if msg:
            super().__init__(msg)
        else:
            super().__init__()
        self.__field = field

    @property
    def field(self) -> Optional[str]:
        return self.__field

    def __str__(self) -> str:
        if self.__field is not None:
            return f"{self.__class__.__name__}: {self.__field}: {super().__str__()}"
        else:
            return super().__str__()


class InvalidArgument(GenericPolarDpError, ValueError):
    pass


class UnsupportedOperation(GenericPolarDpError):
    pass


class ConfigurationError(GenericPolarDpError):
    pass


class MalformedDocument(GenericPolarDpError):
    pass


class AcceptanceCheckFailed(GenericPolarDpError):
    pass
