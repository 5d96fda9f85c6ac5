"""Command-line front end: code construction, SW simulations, video
encode/decode, RD sweeps and BD-PSNR comparison.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 decode failure.
Every CSV output starts with comment lines embedding the resolved config and
the package version.
"""

import csv
import functools
import io
import json
import sys
import time

import click
import numpy as np

from . import __version__
from .config import ExperimentConfig, ConfigError, DecodeError
from .construction import build_reliability_sequence, save_sequence
from .metrics import bd_psnr
from .pipeline import WzCodec, run_codec
from .simulate import sw_simulate
from .video_io import read_raw, write_raw, read_y4m

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DECODE = 4


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except DecodeError as exc:
            click.echo(f"decode error: {exc}", err=True)
            sys.exit(EXIT_DECODE)
        except (OSError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)
    return wrapper


def _csv_header(fh, cfg_dict):
    fh.write(f"# polardvc {__version__}\n")
    fh.write(f"# config: {json.dumps(cfg_dict, sort_keys=True)}\n")


def _read_csv_with_comments(path):
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("".join(rows))))


def _load_frames(path, cfg):
    if str(path).endswith(".y4m"):
        frames, meta = read_y4m(path, max_frames=cfg.max_frames)
        if (meta["width"], meta["height"]) != (cfg.width, cfg.height):
            raise ConfigError(
                f"config says {cfg.width}x{cfg.height} but {path} is "
                f"{meta['width']}x{meta['height']}")
        return frames
    return read_raw(path, cfg.width, cfg.height, max_frames=cfg.max_frames)


def _config_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="JSON config file; flags override it."),
        click.option("--codec", type=click.Choice(["polar", "ldpca"]), default=None),
        click.option("--llr-mode", type=click.Choice(["basic", "proposed"]), default=None),
        click.option("--width", type=int, default=None),
        click.option("--height", type=int, default=None),
        click.option("--fps", type=float, default=None),
        click.option("--gop", type=int, default=None),
        click.option("-f", "--quality", "f", type=int, default=None,
                     help="Quality point 0..7."),
        click.option("--list-size", type=int, default=None),
        click.option("--seed", type=int, default=None),
        click.option("--alpha-mode", type=click.Choice(["oracle", "fixed"]), default=None),
        click.option("--alpha-fixed", type=float, default=None),
        click.option("--max-frames", type=int, default=None),
        click.option("--cache-dir", type=click.Path(), default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(config_path, **overrides) -> ExperimentConfig:
    return ExperimentConfig.from_sources(config_path, **overrides)


@click.group()
@click.version_option(__version__)
def main():
    """Distributed video coding toolkit with polar-code Slepian-Wolf codecs."""


@main.command()
@click.option("--n", type=int, required=True, help="Code length (before padding).")
@click.option("--target", "-T", "target", type=float, default=1e-3, show_default=True,
              help="Per-channel target error rate.")
@click.option("--eps", type=float, default=1e-4, show_default=True,
              help="Bisection tolerance on the target.")
@click.option("--big-n", type=int, default=None,
              help="Mother code length (default: next power of two).")
@click.option("--out", type=click.Path(), required=True)
@_handle_errors
def construct(n, target, eps, big_n, out):
    """Build a nested reliability sequence and write it to a file."""
    t0 = time.perf_counter()
    seq = build_reliability_sequence(n, target, eps, N=big_n)
    if big_n is None:
        big_n = 1 << max(1, int(np.ceil(np.log2(n))))
    save_sequence(out, seq, n, target, eps, big_n)
    click.echo(f"wrote {out} ({len(seq)} indices, "
               f"{time.perf_counter() - t0:.1f}s)")


@main.command()
@click.option("--n", type=int, default=1584, show_default=True)
@click.option("--alpha", "alphas", type=float, multiple=True, required=True,
              help="Laplace parameter; repeatable.")
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--codec", type=click.Choice(["polar", "ldpca"]), default="polar",
              show_default=True)
@click.option("--llr-mode", type=click.Choice(["basic", "proposed"]),
              default="proposed", show_default=True)
@click.option("--mu", type=int, default=4, show_default=True)
@click.option("--beta", type=int, default=10, show_default=True)
@click.option("--list-size", type=int, default=32, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cache-dir", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), required=True)
@_handle_errors
def swsim(n, alphas, trials, codec, llr_mode, mu, beta, list_size, seed,
          cache_dir, out):
    """Synthetic Slepian-Wolf simulation over a Laplace channel."""
    resolved = {"n": n, "alphas": list(alphas), "trials": trials,
                "codec": codec, "llr_mode": llr_mode, "mu": mu, "beta": beta,
                "list_size": list_size, "seed": seed}
    with open(out, "w", newline="") as fh:
        _csv_header(fh, resolved)
        writer = csv.writer(fh)
        writer.writerow(["alpha", "mean_rate", "std_rate", "cond_entropy",
                         "false_accepts", "bitplanes", "time_per_band_s"])
        for alpha in alphas:
            res = sw_simulate(n, alpha, trials, codec=codec,
                              llr_mode=llr_mode, seed=seed, mu=mu, beta=beta,
                              list_size=list_size, cache_dir=cache_dir)
            writer.writerow([alpha, f"{res['mean_rate']:.6f}",
                             f"{res['std_rate']:.6f}",
                             f"{res['cond_entropy']:.6f}",
                             res["false_accepts"], res["bitplanes"],
                             f"{res['time_per_band_s']:.4f}"])
            click.echo(f"alpha={alpha}: rate={res['mean_rate']:.4f} "
                       f"H={res['cond_entropy']:.4f} "
                       f"({res['time_per_band_s']:.2f}s/band)")
    click.echo(f"wrote {out}")


@main.command()
@click.argument("video", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True,
              help="Compressed artifact (.npz).")
@_config_options
@_handle_errors
def encode(video, out, config_path, **overrides):
    """Compress a video into a syndrome-buffer artifact."""
    cfg = _build_config(config_path, **overrides)
    frames = _load_frames(video, cfg)
    codec = WzCodec(cfg)
    artifact = codec.encode(frames)
    np.savez_compressed(out, artifact=np.array([artifact], dtype=object),
                        version=__version__)
    click.echo(f"wrote {out} ({len(frames)} frames, "
               f"{len(artifact['wz'])} WZ frames)")


@main.command()
@click.argument("artifact_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True,
              help="Decoded raw video output.")
@click.option("--frames-csv", type=click.Path(), default=None)
@click.option("--transcript-csv", type=click.Path(), default=None)
@click.option("--reference", type=click.Path(), default=None,
              help="Original video for PSNR reporting.")
@_handle_errors
def decode(artifact_path, out, frames_csv, transcript_csv, reference):
    """Decode a compressed artifact back to raw video."""
    with np.load(artifact_path, allow_pickle=True) as data:
        artifact = data["artifact"][0]
    cfg = ExperimentConfig(**{k: v for k, v in artifact["config"].items()
                              if k != "extra"})
    codec = WzCodec(cfg)
    t0 = time.perf_counter()
    decoded, stats, band_reports, transcripts = codec.decode(artifact)
    wall = time.perf_counter() - t0
    write_raw(out, decoded)
    ref = _load_frames(reference, cfg) if reference else None
    if ref is not None:
        from .metrics import psnr
        for st in stats:
            st.psnr_db = psnr(ref[st.index], decoded[st.index])
    if frames_csv:
        with open(frames_csv, "w", newline="") as fh:
            _csv_header(fh, cfg.to_dict())
            writer = csv.writer(fh)
            writer.writerow(["frame", "type", "rate_bits", "key_rate_bits",
                             "psnr_db"])
            for st in stats:
                writer.writerow([st.index, st.ftype, st.rate_bits,
                                 st.key_rate_bits,
                                 f"{st.psnr_db:.4f}" if ref is not None
                                 or st.ftype == "key" else ""])
    if transcript_csv:
        with open(transcript_csv, "w", newline="") as fh:
            _csv_header(fh, cfg.to_dict())
            writer = csv.writer(fh)
            writer.writerow(["frame", "band", "level", "chunks_requested",
                             "bits_sent", "crc_pass", "terminal_method"])
            for frame_idx, tr in transcripts:
                crc_pass = tr.requests[-1][2] if tr.requests else False
                writer.writerow([frame_idx, tr.band, tr.level,
                                 tr.chunks_requested, tr.bits_sent,
                                 int(crc_pass), tr.terminal])
    n_wz = sum(1 for st in stats if st.ftype == "wz")
    per_frame = wall / max(n_wz, 1)
    click.echo(f"wrote {out} ({len(decoded)} frames, "
               f"{per_frame:.2f}s per WZ frame)")


@main.command(name="rd-sweep")
@click.argument("video", type=click.Path(exists=True))
@click.option("--f-list", default="0,1,2,3,4,5,6,7", show_default=True,
              help="Comma-separated quality points.")
@click.option("--out", type=click.Path(), required=True)
@_config_options
@_handle_errors
def rd_sweep(video, f_list, out, config_path, **overrides):
    """Sweep the quality point and write one RD row per value of f."""
    try:
        f_values = [int(tok) for tok in f_list.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --f-list: {exc}") from exc
    base = _build_config(config_path, **overrides)
    frames = _load_frames(video, base)
    rows = []
    for f in f_values:
        cfg = _build_config(config_path, **{**overrides, "f": f})
        t0 = time.perf_counter()
        _, point, stats, _, _ = run_codec(frames, cfg)
        wall = time.perf_counter() - t0
        n_wz = sum(1 for st in stats if st.ftype == "wz")
        key_kbps = (sum(st.key_rate_bits for st in stats)
                    * cfg.fps / len(frames) / 1000.0)
        rows.append([f, f"{point.rate_kbps:.4f}", f"{key_kbps:.4f}",
                     f"{point.psnr_db:.4f}",
                     f"{wall / max(n_wz, 1):.3f}"])
        click.echo(f"f={f}: {point.rate_kbps:.1f} kbps, "
                   f"{point.psnr_db:.2f} dB")
    with open(out, "w", newline="") as fh:
        _csv_header(fh, base.to_dict())
        writer = csv.writer(fh)
        writer.writerow(["f", "rate_kbps", "key_rate_kbps", "psnr_db",
                         "decode_s_per_wz_frame"])
        writer.writerows(rows)
    click.echo(f"wrote {out}")


@main.command()
@click.argument("curve_a", type=click.Path(exists=True))
@click.argument("curve_b", type=click.Path(exists=True))
@_handle_errors
def bd(curve_a, curve_b):
    """BD-PSNR of curve B relative to curve A (both rd-sweep CSVs)."""
    def load(path):
        rows = _read_csv_with_comments(path)
        if not rows:
            raise ValueError(f"{path}: no RD rows")
        rates = [float(r["rate_kbps"]) for r in rows]
        psnrs = [float(r["psnr_db"]) for r in rows]
        return rates, psnrs

    ra, pa = load(curve_a)
    rb, pb = load(curve_b)
    delta = bd_psnr(ra, pa, rb, pb)
    click.echo(f"BD-PSNR (B - A): {delta:+.4f} dB")


if __name__ == "__main__":
    main()
