"""Link-budget and noise model of a multi-span amplified optical line.

The line is: transmitter -> (tx monitor) -> pre-booster monitor -> booster
-> N x [fiber span -> span monitor -> in-line amplifier] -> receiver.

The booster runs in constant-output-power mode, the in-line amplifiers in
fixed-gain mode with gain equal to the nominal loss of their span.  A tap
(eavesdropping event) is a lumped loss at one location.  Powers are tracked
in dBm, ASE noise in linear mW.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy.stats import binom

from .errors import ConfigError

PLANCK = 6.62607015e-34  # J*s


def lin_to_db(x):
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class LinkConfig:
    """Static description of the simulated line.

    ``span_loss_db`` defaults to 10 dB for each of ``n_spans`` spans.  The
    launch power sits 20 dB below the booster target so that the booster
    contributes the dominant share of ASE; see README for the rationale.
    """

    n_spans: int = 4
    span_loss_db: tuple[float, ...] | None = None
    launch_power_dbm: float = -20.0
    booster_target_dbm: float = 0.0
    noise_figure_db: float = 5.0
    center_frequency_thz: float = 193.41
    ref_bandwidth_ghz: float = 12.5
    symbol_rate_gbaud: float = 28.0
    power_noise_sigma_db: float = 0.02
    osnr_noise_sigma_db: float = 0.02
    n_bits_per_ber: int = 2**23

    def __post_init__(self):
        if isinstance(self.n_spans, bool) or not isinstance(self.n_spans, (int, np.integer)) or self.n_spans < 1:
            raise ConfigError(f"n_spans must be a positive integer, got {self.n_spans!r}")
        if self.span_loss_db is None:
            losses = (10.0,) * int(self.n_spans)
        else:
            losses = tuple(float(x) for x in self.span_loss_db)
        object.__setattr__(self, "span_loss_db", losses)
        if len(losses) != self.n_spans:
            raise ConfigError(f"span_loss_db has {len(losses)} entries for {self.n_spans} spans")
        if not all(math.isfinite(x) and x > 0 for x in losses):
            raise ConfigError("every span loss must be finite and > 0 dB")
        for name in ("launch_power_dbm", "booster_target_dbm", "noise_figure_db",
                     "center_frequency_thz", "ref_bandwidth_ghz", "symbol_rate_gbaud",
                     "power_noise_sigma_db", "osnr_noise_sigma_db"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise ConfigError(f"{name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite")
            object.__setattr__(self, name, float(value))
        if self.ref_bandwidth_ghz <= 0 or self.symbol_rate_gbaud <= 0 or self.center_frequency_thz <= 0:
            raise ConfigError("frequencies and bandwidths must be > 0")
        if self.power_noise_sigma_db < 0 or self.osnr_noise_sigma_db < 0:
            raise ConfigError("noise sigmas must be >= 0")
        if (isinstance(self.n_bits_per_ber, bool) or not isinstance(self.n_bits_per_ber, (int, np.integer))
                or self.n_bits_per_ber < 1):
            raise ConfigError(f"n_bits_per_ber must be an integer >= 1, got {self.n_bits_per_ber!r}")
        object.__setattr__(self, "n_spans", int(self.n_spans))
        object.__setattr__(self, "n_bits_per_ber", int(self.n_bits_per_ber))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["span_loss_db"] = list(self.span_loss_db)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "LinkConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = dict(data)
        if "span_loss_db" in kwargs and kwargs["span_loss_db"] is not None:
            if not isinstance(kwargs["span_loss_db"], (list, tuple)):
                raise ConfigError("span_loss_db must be a list of numbers")
            kwargs["span_loss_db"] = tuple(kwargs["span_loss_db"])
        if "n_spans" not in kwargs and kwargs.get("span_loss_db") is not None:
            kwargs["n_spans"] = len(kwargs["span_loss_db"])
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> LinkConfig:
    """Read a JSON object whose keys are ``LinkConfig`` field names."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a flat JSON object")
    return LinkConfig.from_dict(data)


def dump_config(config: LinkConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"


class Location(enum.Enum):
    NONE = "none"
    TRANSMITTER = "tx"
    PREBOOSTER = "prebooster"
    SPAN = "span"


@dataclass(frozen=True)
class TapEvent:
    """A lumped power loss at one point of the line.

    ``span`` is the 1-based span index and is only meaningful for
    ``Location.SPAN``.
    """

    location: Location = Location.NONE
    loss_db: float = 0.0
    span: int = 0

    def __post_init__(self):
        if not isinstance(self.location, Location):
            raise ValueError(f"location must be a Location, got {self.location!r}")
        loss = float(self.loss_db)
        if not math.isfinite(loss) or loss < 0:
            raise ValueError(f"tap loss must be finite and >= 0 dB, got {self.loss_db!r}")
        object.__setattr__(self, "loss_db", loss)
        if (self.location is Location.NONE) != (loss == 0.0):
            raise ValueError("a tap has zero loss exactly when its location is NONE")
        if self.location is Location.SPAN:
            if self.span < 1:
                raise ValueError(f"span index must be >= 1, got {self.span}")
        elif self.span != 0:
            raise ValueError("span index is only valid for Location.SPAN")

    @classmethod
    def none(cls) -> "TapEvent":
        return cls()

    @classmethod
    def transmitter(cls, loss_db: float) -> "TapEvent":
        return cls(Location.TRANSMITTER, loss_db)

    @classmethod
    def prebooster(cls, loss_db: float) -> "TapEvent":
        return cls(Location.PREBOOSTER, loss_db)

    @classmethod
    def in_span(cls, span: int, loss_db: float) -> "TapEvent":
        return cls(Location.SPAN, loss_db, span)

    @property
    def token(self) -> str:
        if self.location is Location.SPAN:
            return f"span{self.span}"
        return self.location.value

    @classmethod
    def from_token(cls, token: str, loss_db: float) -> "TapEvent":
        if token.startswith("span"):
            digits = token[4:]
            if not digits.isdigit():
                raise ValueError(f"unknown location token {token!r}")
            return cls(Location.SPAN, loss_db, int(digits))
        try:
            location = Location(token)
        except ValueError:
            raise ValueError(f"unknown location token {token!r}") from None
        if location is Location.SPAN:
            raise ValueError(f"unknown location token {token!r}")
        return cls(location, loss_db)

    def check_against(self, config: LinkConfig) -> None:
        if self.location is Location.SPAN and self.span > config.n_spans:
            raise ValueError(f"span{self.span} is outside a {config.n_spans}-span line")


@dataclass(frozen=True)
class OpmSample:
    """One telemetry record; powers in dBm, OSNR in dB over the reference bandwidth."""

    osnr_db: float
    ber: float
    p_rx_dbm: float
    p_tx_dbm: float
    p_link_dbm: float
    p_span_dbm: tuple[float, ...] = field(default_factory=tuple)

    def as_vector(self) -> list[float]:
        """Values in canonical feature order."""
        return [self.osnr_db, self.ber, self.p_rx_dbm, self.p_tx_dbm, self.p_link_dbm, *self.p_span_dbm]


def ase_power_mw(config: LinkConfig, gain_db: float) -> float:
    """ASE power (both polarizations, reference bandwidth) at an amplifier output.

    An amplifier with gain below unity adds no noise.
    """
    f_lin = 10.0 ** (config.noise_figure_db / 10.0)
    photon = PLANCK * config.center_frequency_thz * 1e12
    b_ref = config.ref_bandwidth_ghz * 1e9
    return max(f_lin * photon * b_ref * (10.0 ** (gain_db / 10.0) - 1.0), 0.0) * 1e3


def ber_from_osnr(osnr_db: float, config: LinkConfig) -> float:
    """Analytic DP-QPSK BER from OSNR in the reference bandwidth."""
    snr = 10.0 ** (osnr_db / 10.0) * config.ref_bandwidth_ghz / config.symbol_rate_gbaud
    return 0.5 * math.erfc(math.sqrt(snr))


def propagate(config: LinkConfig, event: TapEvent) -> OpmSample:
    """Noiseless monitor readings for ``event``; ``ber`` is the analytic BER."""
    event.check_against(config)
    loss = event.loss_db
    loc = event.location

    p_tx = config.launch_power_dbm - (loss if loc is Location.TRANSMITTER else 0.0)
    p_link = p_tx - (loss if loc is Location.PREBOOSTER else 0.0)
    booster_gain = config.booster_target_dbm - p_link
    ase = ase_power_mw(config, booster_gain)

    p_in = config.booster_target_dbm
    p_span = []
    for i, span_loss in enumerate(config.span_loss_db, start=1):
        attenuation = span_loss + (loss if loc is Location.SPAN and event.span == i else 0.0)
        p_mon = p_in - attenuation
        p_span.append(p_mon)
        # fixed-gain in-line amplifier restores the nominal span loss only
        ase = ase * 10.0 ** ((span_loss - attenuation) / 10.0) + ase_power_mw(config, span_loss)
        p_in = p_mon + span_loss

    osnr_db = lin_to_db(10.0 ** (p_in / 10.0) / ase)
    return OpmSample(
        osnr_db=osnr_db,
        ber=ber_from_osnr(osnr_db, config),
        p_rx_dbm=p_in,
        p_tx_dbm=p_tx,
        p_link_dbm=p_link,
        p_span_dbm=tuple(p_span),
    )


def sample_opm(config: LinkConfig, event: TapEvent, rng: np.random.Generator) -> OpmSample:
    """One noisy measurement.

    Every call consumes exactly ``4 + n_spans`` standard normals followed by
    one uniform from ``rng``, whatever the BER, so streams stay aligned
    across events.  The bit-error count is the binomial quantile of that
    uniform.
    """
    clean = propagate(config, event)
    z = rng.standard_normal(4 + config.n_spans)
    u = rng.random()

    sp, so = config.power_noise_sigma_db, config.osnr_noise_sigma_db
    if clean.ber > 0.0:
        errors = max(int(binom.ppf(u, config.n_bits_per_ber, clean.ber)), 0)
        ber = errors / config.n_bits_per_ber
    else:
        ber = 0.0
    return OpmSample(
        osnr_db=clean.osnr_db + so * z[0],
        ber=ber,
        p_rx_dbm=clean.p_rx_dbm + sp * z[1],
        p_tx_dbm=clean.p_tx_dbm + sp * z[2],
        p_link_dbm=clean.p_link_dbm + sp * z[3],
        p_span_dbm=tuple(p + sp * zi for p, zi in zip(clean.p_span_dbm, z[4:])),
    )
