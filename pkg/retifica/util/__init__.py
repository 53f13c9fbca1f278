from .sym import count_common_zeros, exact_divide, gcd_forms, intersection_count

__all__ = ["count_common_zeros", "exact_divide", "gcd_forms", "intersection_count"]
