"""eit-secrecy: 窃听信道的局部（EIT）保密度量工具箱。"""

__version__ = "0.1.0"
