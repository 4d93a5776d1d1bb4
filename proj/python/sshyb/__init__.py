"""Two-stage multichannel speech enhancement.

A hybrid minimum-power beamformer evaluates a dictionary of MVDR solutions
built from candidate noise-field models at every time-frequency bin, and a
spectral PCA stage projects the result onto the dominant common component of
the hybrid and isotropic outputs.
"""

from _sshyb import (
    AtfSet,
    SshybError,
    enhance,
    freefield_atf,
    fw_seg_snr,
    read_atf,
    read_wav,
    render_preset,
    seg_snr,
    si_sdr,
    spectral_flux,
    write_atf,
    write_wav,
)

__all__ = [
    "AtfSet",
    "SshybError",
    "enhance",
    "freefield_atf",
    "fw_seg_snr",
    "read_atf",
    "read_wav",
    "render_preset",
    "seg_snr",
    "si_sdr",
    "spectral_flux",
    "write_atf",
    "write_wav",
]
