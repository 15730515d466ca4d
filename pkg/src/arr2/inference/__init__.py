"""Inference machinery: transforms, gradients, NUTS sampling, diagnostics.

Only :mod:`arr2.inference.autodiff` is imported eagerly; the heavier
submodules are loaded on first attribute access so that low-level modules
(distributions, priors) can depend on the tape without import cycles.
"""

_LAZY = {
    "TransformMap": ("arr2.inference.transforms", "TransformMap"),
    "grad_logposterior": ("arr2.inference.nuts", "grad_logposterior"),
    "nuts_sample": ("arr2.inference.nuts", "nuts_sample"),
    "sample_from_logdensity": ("arr2.inference.nuts", "sample_from_logdensity"),
    "SamplerConfig": ("arr2.inference.nuts", "SamplerConfig"),
    "DrawsMatrix": ("arr2.inference.nuts", "DrawsMatrix"),
    "diagnostics": ("arr2.inference.diagnostics", "diagnostics"),
    "Diagnostics": ("arr2.inference.diagnostics", "Diagnostics"),
}


def __getattr__(name):
    try:
        module_name, attr = _LAZY[name]
    except KeyError:
        raise AttributeError(name) from None
    import importlib

    return getattr(importlib.import_module(module_name), attr)


__all__ = ["autodiff", *_LAZY]
