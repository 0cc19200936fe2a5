"""Audio-band software modem: AM, FM, BFSK and on-off QAM over WAV files."""

from .analog import AmParams, FmParams, am_demodulate, am_modulate, fm_demodulate, fm_modulate
from .channel import ChannelSpec, apply_channel
from .digital import (
    BfskParams,
    BitFrame,
    QamParams,
    bfsk_demodulate,
    bfsk_modulate,
    bits_to_text,
    find_signal_start,
    qam_demodulate,
    qam_modulate,
    text_to_bits,
)
from .errors import ModemError
from .filters import DesignedFilter, FilterKind, FilterSpec, apply_filter, design_butterworth, frequency_response
from .signals import (
    Signal,
    Spectrum,
    align_by_crosscorrelation,
    differentiate,
    generate_tone,
    power_spectral_density,
    rectify_fullwave,
    scale,
    trapezoidal_integrate,
)
from .wavio import read_wav, write_wav

__version__ = "0.1.0"
