from hypothesis import strategies as st

from hardycf.cfl.syntax import And, BoxArrow, Implies, OutcomeAtom, SettingAtom
from hardycf.hardy import OutcomeLabel, SettingLabel

atoms = st.one_of(
    st.sampled_from(list(SettingLabel)).map(SettingAtom),
    st.sampled_from(list(OutcomeLabel)).map(OutcomeAtom),
)


def formulas(max_depth: int = 6):
    """Formula ASTs whose depth never exceeds ``max_depth``."""
    if max_depth == 0:
        return atoms
    sub = formulas(max_depth - 1)
    return st.one_of(
        atoms,
        st.builds(And, sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(BoxArrow, st.sampled_from(list(SettingLabel)), sub),
    )
