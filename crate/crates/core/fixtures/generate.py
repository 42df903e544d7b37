"""Regenerate the FCIDUMP fixtures and their reference energies.

Requires pyscf. Integrals are expressed in the meta-Lowdin orthonormal
localized-orbital basis (one LO per hydrogen 1s, atom-centred LOs for N2).

    python3 generate.py            # H2 / H4 / H6 fixtures
    python3 generate.py --with-n2  # also the 10-orbital N2 fixture
"""
import json
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, lo, mp, scf
from pyscf.tools import fcidump


def chain(n, d):
    return [("H", (0.0, 0.0, i * d)) for i in range(n)]


def build(name, atoms, basis="sto-3g"):
    mol = gto.M(atom=atoms, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-13
    mf.conv_tol_grad = 1e-10
    mf.max_cycle = 500
    e_hf = mf.kernel()
    assert mf.converged, name

    c_lo = lo.orth_ao(mol, "meta_lowdin")
    h1 = c_lo.T @ mf.get_hcore() @ c_lo
    norb = c_lo.shape[1]
    eri = ao2mo.restore(1, ao2mo.full(mol, c_lo), norb)
    nelec = mol.nelectron
    e_nuc = mol.energy_nuc()

    e_fci, _ = fci.direct_spin1.kernel(h1, eri, norb, nelec, ecore=e_nuc,
                                       conv_tol=1e-14, max_cycle=500)
    e_mp2 = mf.e_tot + mp.MP2(mf).kernel()[0]

    fcidump.from_integrals(f"{name}.fcidump", h1, eri, norb, nelec,
                           nuc=e_nuc, ms=0, tol=1e-16)
    return {
        "name": name,
        "file": f"{name}.fcidump",
        "basis": basis,
        "orbitals": "meta-lowdin",
        "n_orb": int(norb),
        "n_elec": int(nelec),
        "e_nuc": float(e_nuc),
        "e_hf": float(e_hf),
        "e_mp2": float(e_mp2),
        "e_fci": float(e_fci),
        "onsite_0000": float(eri[0, 0, 0, 0]),
    }


def main():
    entries = []
    specs = [("h2_0.74", chain(2, 0.74), 0.74)]
    for d in (1.0, 1.5):
        specs.append((f"h4_{d:.2f}", chain(4, d), d))
    for d in (1.0, 1.5, 2.0, 2.4):
        specs.append((f"h6_{d:.2f}", chain(6, d), d))
    if "--with-n2" in sys.argv:
        specs.append(("n2_0.80", [("N", (0, 0, 0)), ("N", (0, 0, 0.8))], 0.8))
    for name, atoms, d in specs:
        entry = build(name, atoms)
        entry["distance_angstrom"] = d
        entries.append(entry)
        print(name, entry["e_hf"], entry["e_fci"])
    with open("reference.json", "w") as fh:
        json.dump({"generator": "pyscf", "entries": entries}, fh, indent=2)


if __name__ == "__main__":
    main()
