"""
Moment bases and the circuits they cost
=======================================

A moment basis is grown from the reference state by repeatedly applying the
Hamiltonian's Pauli terms. Because every term is a Pauli string, every basis
state is ``R_i |psi>`` for a single Pauli string ``R_i``, and the basis is
stored as a list of those strings.
"""

# %%
# Pauli strings carry their phase exactly. Qubit 0 is the leftmost label
# character.
from tqs import PauliString

x, z = PauliString.from_label("XI"), PauliString.from_label("ZZ")
print(x * z, (x * z).phase)

# %%
# Basis sizes grow level by level until the set closes under the terms.
from tqs.models import heisenberg2, tfi2, tfi8, xx_chain
from tqs.moments import build_cumulative_moments, closed_basis, closure_reached

for name, h, k_max in [("heisenberg2", heisenberg2(), 1), ("xx-chain4", xx_chain(4), 3), ("tfi8", tfi8(), 2)]:
    sizes = [len(build_cumulative_moments(h, k)) for k in range(k_max + 1)]
    print(f"{name:12s} sizes by order: {sizes}")

h4 = xx_chain(4)
print("xx-chain4 closed at k=2?", closure_reached(build_cumulative_moments(h4, 2), h4))
print("xx-chain4 closed at k=3?", closure_reached(build_cumulative_moments(h4, 3), h4))

# %%
# The dump lists each representative with the word of term indices that first
# produced it.
print(build_cumulative_moments(h4, 3).to_text())

# %%
# Every overlap entry reduces to one Pauli expectation in the reference state.
# Entries that need the same string share one measured circuit.
from tqs.overlaps import circuit_count

h = tfi2()
basis = closed_basis(h)
print(f"tfi2: {len(basis)} basis states, {circuit_count(basis, h)} circuits for E and D, "
      f"{circuit_count(basis, h, include_J=True)} with J")
