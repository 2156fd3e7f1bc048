"""cosetlab: a desk-scale workbench for hidden coset states.

GF(2) coset algebra, exact statevector simulation, transparent obfuscation
stubs, tokenized signatures, single-decryptor encryption, copy-protected
PRFs, measurement-theoretic tooling, security games, and analytic bounds.
"""

__version__ = "0.1.0"
