from .families import FAMILIES, gen_family

__all__ = ["FAMILIES", "gen_family"]
