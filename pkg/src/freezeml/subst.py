"""Finite maps on type variables: application, composition, well-formedness.

The same application algorithm serves rigid instantiations and flexible
substitutions; the two differ only in the judgement that validates them
(:func:`inst_wf` vs :func:`subst_wf`).  Substitutions are kept in
triangular form and composed explicitly rather than resolved through a
mutable store, so the soundness and completeness properties of
unification and inference can be tested as written.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional

from .syntax import (
    Con,
    Forall,
    INTERNAL_PREFIX,
    Kind,
    KindEnv,
    LookupEnv,
    RefinedKindEnv,
    TVar,
    Type,
    TypeEnv,
    all_type_names,
    arrow,
    ftv_ordered,
    internal_index,
)
from .statics import StaticsError, kind_of


class Subst:
    """Ordered finite map from type-variable names to types."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[str, Type] | Iterable[tuple[str, Type]] = ()):
        if isinstance(mapping, Mapping):
            self._map = dict(mapping)
        else:
            self._map = dict(mapping)

    @staticmethod
    def identity(names: Iterable[str]) -> "Subst":
        return Subst((n, TVar(n)) for n in names)

    def domain(self) -> tuple[str, ...]:
        return tuple(self._map)

    def items(self) -> Iterator[tuple[str, Type]]:
        return iter(self._map.items())

    def get(self, name: str) -> Optional[Type]:
        return self._map.get(name)

    def lookup(self, name: str) -> Type:
        """Image of a variable; unmapped variables are unchanged."""
        return self._map.get(name, TVar(name))

    def extend(self, name: str, ty: Type) -> "Subst":
        new = dict(self._map)
        new[name] = ty
        return Subst(new)

    def without(self, name: str) -> "Subst":
        new = dict(self._map)
        new.pop(name, None)
        return Subst(new)

    def is_identity(self) -> bool:
        return all(isinstance(t, TVar) and t.name == n for n, t in self._map.items())

    def ftv(self) -> list[str]:
        """Ordered free variables of the range, in domain order."""
        if not self._map:
            return []
        chain: Type | None = None
        for ty in reversed(self._map.values()):
            chain = ty if chain is None else arrow(ty, chain)
        return ftv_ordered(chain)

    def apply(self, a: Type) -> Type:
        return _apply(self._map, a)

    def apply_env(self, gamma: TypeEnv) -> TypeEnv:
        return gamma.map_types(self.apply)

    def compose(self, inner: "Subst") -> "Subst":
        """self after inner: the domain is inner's, images pass through self."""
        return Subst((n, self.apply(t)) for n, t in inner._map.items())

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subst) and self._map == other._map

    def __repr__(self) -> str:
        inner = ", ".join(f"{n} -> {t}" for n, t in self._map.items())
        return f"Subst[{inner}]"


def _apply(mapping: dict[str, Type], a: Type) -> Type:
    if not mapping:
        return a
    if isinstance(a, TVar):
        return mapping.get(a.name, a)
    if isinstance(a, Con):
        return Con(a.con, tuple(_apply(mapping, arg) for arg in a.args))
    if isinstance(a, Forall):
        inner = {n: t for n, t in mapping.items() if n != a.var}
        if not inner:
            return a
        # Rename the binder when an image could capture it.
        capture = any(
            a.var in ftv_ordered(t)
            for n, t in inner.items()
        )
        if capture:
            fresh = _fresh_name(inner, a)
            renamed = _apply({a.var: TVar(fresh)}, a.body)
            return Forall(fresh, _apply(inner, renamed))
        return Forall(a.var, _apply(inner, a.body))
    raise TypeError(f"not a type: {a!r}")


def _fresh_name(mapping: dict[str, Type], a: Type) -> str:
    """Deterministic fresh name: one past the largest internal index in play."""
    taken = set(all_type_names(a))
    taken.update(mapping)
    for ty in mapping.values():
        taken.update(all_type_names(ty))
    index = 0
    for name in taken:
        i = internal_index(name)
        if i is not None:
            index = max(index, i + 1)
    while f"{INTERNAL_PREFIX}{index}" in taken:
        index += 1
    return f"{INTERNAL_PREFIX}{index}"


# ---------------------------------------------------------------------------
# Well-formedness judgements
# ---------------------------------------------------------------------------

def _disjoint(xs: Iterable[str], ys: Iterable[str]) -> bool:
    return not (set(xs) & set(ys))


def subst_wf(
    delta: KindEnv,
    theta: Subst,
    theta_in: RefinedKindEnv,
    theta_out: RefinedKindEnv,
) -> bool:
    """Does theta map each flexible variable of theta_in to a type of its
    kind over delta, theta_out?"""
    if not _disjoint(delta.names(), theta_in.names()):
        return False
    if not _disjoint(delta.names(), theta_out.names()):
        return False
    if set(theta.domain()) != set(theta_in.names()):
        return False
    env = LookupEnv(delta, theta_out)
    for name, kind in theta_in:
        image = theta.lookup(name)
        try:
            if not kind_of(env, image).le(kind):
                return False
        except StaticsError:
            return False
    return True


def inst_wf(
    delta: KindEnv,
    inst: Subst,
    delta_in: KindEnv,
    kind: Kind,
    delta_out: KindEnv,
) -> bool:
    """Does inst map each rigid variable of delta_in to a type of kind at
    most `kind` over delta, delta_out?"""
    if not _disjoint(delta.names(), delta_in.names()):
        return False
    if not _disjoint(delta.names(), delta_out.names()):
        return False
    if set(inst.domain()) != set(delta_in.names()):
        return False
    env = KindEnv(delta.names() + delta_out.names())
    for name in delta_in:
        image = inst.lookup(name)
        try:
            if not kind_of(env, image).le(kind):
                return False
        except StaticsError:
            return False
    return True


def demote(kind: Kind, theta: RefinedKindEnv, names: Iterable[str]) -> RefinedKindEnv:
    """Force the listed flexible variables down to the monomorphic kind.

    Demoting at poly is the identity; demotion never changes which
    variables are present.
    """
    if kind is Kind.POLY:
        return theta
    targets = set(names)
    return RefinedKindEnv(
        (n, Kind.MONO if n in targets else k) for n, k in theta
    )
