"""QCNN: hybrid quantum-classical image classifier on a statevector simulator"""

__version__ = "1.0.0"
