"""Kaya: a testing framework for blockchain DApps.

Executes DBDL-described test cases (front-end events plus blockchain
pre-state) against a pluggable smart-contract VM, translating named
contract variables to raw storage addresses and back, and produces
per-variable change reports with cross-case correlation findings.
"""

__version__ = "0.1.0"
