from .bareiss import BareissImpl

__all__ = ["BareissImpl"]
