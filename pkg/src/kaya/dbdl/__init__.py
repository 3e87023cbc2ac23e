"""DBDL: the DApp behavior description language for test cases."""

from .ast import (
    WEI_PER_ETHER,
    AccountDecl,
    ContractRef,
    Expectation,
    FrontendEvent,
    Literal,
    PreStateParam,
    RawAccessor,
    RawPath,
    TestCase,
    TestSuite,
    account_address,
)
from .parser import parse_dbdl
from .printer import format_amount, format_dbdl
from .validate import PathError, type_path, type_value_path, validate

__all__ = [
    "WEI_PER_ETHER", "AccountDecl", "ContractRef", "Expectation", "FrontendEvent",
    "Literal", "PreStateParam", "RawAccessor", "RawPath", "TestCase", "TestSuite",
    "account_address", "parse_dbdl", "format_amount", "format_dbdl",
    "PathError", "type_path", "type_value_path", "validate",
]
