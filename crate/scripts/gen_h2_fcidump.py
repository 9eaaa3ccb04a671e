"""Generate the H2/STO-3G integral file and FCI reference energies.

Run from the repository root:

    python3 scripts/gen_h2_fcidump.py

Writes data/h2_sto3g_0.735.fcidump (MO basis, chemist notation) and
data/h2_sto3g_0.735.reference (flat key = value).
"""

from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

BOND = 0.735

mol = gto.M(atom=f"H 0 0 0; H 0 0 {BOND}", basis="sto-3g", unit="Angstrom", verbose=0)
mf = scf.RHF(mol)
mf.conv_tol = 1e-12
mf.kernel()

fcidump.from_scf(mf, "data/h2_sto3g_0.735.fcidump", tol=1e-15)

h1 = mf.mo_coeff.T @ mf.get_hcore() @ mf.mo_coeff
eri = ao2mo.restore(1, ao2mo.kernel(mol, mf.mo_coeff), mol.nao)
e_fci, _ = fci.direct_spin1.kernel(h1, eri, mol.nao, mol.nelectron, ecore=mol.energy_nuc(), conv_tol=1e-14)

with open("data/h2_sto3g_0.735.reference", "w") as f:
    f.write(f"# H2 STO-3G, R = {BOND} Angstrom, pyscf\n")
    f.write(f"nuclear_repulsion = {mol.energy_nuc():.15f}\n")
    f.write(f"hf_energy = {mf.e_tot:.15f}\n")
    f.write(f"fci_energy = {e_fci:.15f}\n")
