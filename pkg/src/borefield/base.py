"""Minimal estimator plumbing following the scikit-learn parameter protocol.

The estimators in this package implement ``get_params`` / ``set_params`` with
the standard semantics (constructor arguments are stored verbatim, fitted
attributes get a trailing underscore), so they work with ``sklearn.base.clone``
and pipeline-style tooling without requiring scikit-learn as a dependency.
"""

import inspect


class ParamsMixin:
    """get_params/set_params support driven by the ``__init__`` signature."""

    @classmethod
    def _get_param_names(cls):
        sig = inspect.signature(cls.__init__)
        names = [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]
        return sorted(names)

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._get_param_names()}

    def set_params(self, **params):
        valid = set(self._get_param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"
