"""
Spectrum export: per-spectrum `f,S` CSV, per-sector fit rows, and a numpy
bundle holding every sector spectrum of a run.
"""

import csv
import io
import zipfile
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from main.errors import EmptyInput
from main.spectral import PowerLawFit, SectorSpectrum

FIT_FIELDS = ("sector_x", "sector_y", "alpha", "beta", "sigma2", "fitted_bins")
NPZ_TIMESTAMP = (1980, 1, 1, 0, 0, 0)    # member time of every array in spectra.npz


def spectrum_csv(s: SectorSpectrum) -> str:
    lines = ["f,S"]
    lines.extend(f"{int(f)},{float(v):.9g}" for f, v in zip(s.freqs, s.S))
    return "\n".join(lines) + "\n"


def fit_row(fit: PowerLawFit) -> str:
    return "alpha,beta,sigma2,fitted_bins\n" \
        f"{fit.alpha:.9g},{fit.beta:.9g},{fit.sigma2:.9g},{fit.fitted_bins}\n"


def fit_rows_csv(spectra: Sequence[SectorSpectrum]) -> str:
    """One row per sector; fit columns empty where no fit was attached."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(FIT_FIELDS)
    for s in spectra:
        sx, sy = s.sector
        if s.fit is None:
            writer.writerow([sx, sy, "", "", "", ""])
        else:
            writer.writerow([sx, sy, f"{s.fit.alpha:.9g}", f"{s.fit.beta:.9g}",
                             f"{s.fit.sigma2:.9g}", s.fit.fitted_bins])
    return out.getvalue()


def save_spectra(path: Union[str, Path], spectra: Sequence[SectorSpectrum]) -> Path:
    if not spectra:
        raise EmptyInput("no spectra to save")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {
        "freqs": spectra[0].freqs,
        "S": np.stack([s.S for s in spectra]),
        "sectors": np.array([s.sector for s in spectra], dtype=np.int64),
        "n_cells": np.int64(spectra[0].n_cells),
        "T": np.int64(spectra[0].T),
    }
    # same layout as np.savez_compressed, readable with np.load
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as bundle:
        for name, array in arrays.items():
            info = zipfile.ZipInfo(f"{name}.npy", date_time=NPZ_TIMESTAMP)
            info.compress_type = zipfile.ZIP_DEFLATED
            with bundle.open(info, "w", force_zip64=True) as member:
                np.lib.format.write_array(member, np.asanyarray(array), allow_pickle=False)
    return path


def load_spectra(path: Union[str, Path]) -> list:
    with np.load(path) as bundle:
        freqs = bundle["freqs"]
        n_cells, T = int(bundle["n_cells"]), int(bundle["T"])
        return [SectorSpectrum((int(sx), int(sy)), freqs.copy(), S.copy(), n_cells, T)
                for (sx, sy), S in zip(bundle["sectors"], bundle["S"])]


def write_sector_spectra_csv(path: Union[str, Path], spectra: Sequence[SectorSpectrum]) -> Path:
    """Long-format `sector_x,sector_y,f,S`; bins with S = 0 are omitted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("sector_x,sector_y,f,S\n")
        for s in spectra:
            sx, sy = s.sector
            nonzero = s.S > 0
            for f, v in zip(s.freqs[nonzero], s.S[nonzero]):
                fh.write(f"{sx},{sy},{int(f)},{float(v):.9g}\n")
    return path
