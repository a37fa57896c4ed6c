"""A lambda-Pi modulo rewriting kernel with a higher-order logic layer and a
Kuroda double-negation translation from classical to intuitionistic proofs."""

__version__ = "0.1.0"
