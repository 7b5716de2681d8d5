# cli/commands/channel.py
"""`channel gen` 与 `channel inspect`。"""
import argparse
import json
from pathlib import Path

from eit_secrecy.channels import bswc, commutator_norm, describe, quantized_awgn_wiretap
from eit_secrecy.cli.io import RunManifest, load_channel, save_channel, write_manifest
from eit_secrecy.core.errors import SingularPencilError
from eit_secrecy.core.settings import get_settings
from eit_secrecy.eit import eit_system
from eit_secrecy.spectral import eta_loc_sec


def register(subparsers) -> None:
    parser = subparsers.add_parser("channel", help="生成或查看信道文件")
    actions = parser.add_subparsers(dest="action", required=True)

    gen = actions.add_parser("gen", help="生成 BSWC 或量化 AWGN 窃听信道")
    kind = gen.add_mutually_exclusive_group(required=True)
    kind.add_argument("--bswc", nargs=2, type=float, metavar=("P_BOB", "Q_EVE"))
    kind.add_argument("--awgn", nargs=3, type=int, metavar=("NX", "NY", "NZ"))
    gen.add_argument("--bob-snr", type=float, default=8.0, help="Bob 的 Eb/N0 (dB)")
    gen.add_argument("--eve-snr", type=float, default=0.0, help="Eve 的 Eb/N0 (dB)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--jitter", type=float, default=0.0, help="量化门限的相对抖动，0 表示确定性门限")
    gen.add_argument("--out", type=Path, default=None, help="输出文件，默认 <output-dir>/channel.json")
    gen.set_defaults(func=generate)

    inspect = actions.add_parser("inspect", help="打印字母表大小、边缘分布、精确互信息与交换子范数")
    inspect.add_argument("path", type=Path)
    inspect.set_defaults(func=inspect_channel)


def generate(args: argparse.Namespace) -> int:
    if args.bswc is not None:
        wc = bswc(*args.bswc)
        params = {"bswc": list(args.bswc)}
    else:
        nx, ny, nz = args.awgn
        wc = quantized_awgn_wiretap(nx, ny, nz, args.bob_snr, args.eve_snr, rng_seed=args.seed, jitter=args.jitter)
        params = {"awgn": list(args.awgn), "bob_snr": args.bob_snr, "eve_snr": args.eve_snr, "jitter": args.jitter}

    out = args.out or Path(args.output_dir) / "channel.json"
    save_channel(wc, out)
    write_manifest(
        RunManifest(command="channel gen", params=params, seeds={"channel": args.seed}, outputs=[str(out)]),
        out.parent,
    )
    print(out)
    return 0


def inspect_channel(args: argparse.Namespace) -> int:
    wc = load_channel(args.path)
    sys = eit_system(wc)
    info = describe(wc, args.units or get_settings().units)
    info["units"] = args.units or get_settings().units
    info["commutator_norm"] = commutator_norm(sys.v, sys.lam)
    try:
        info["eta_loc_sec"] = eta_loc_sec(sys)
    except SingularPencilError:
        info["eta_loc_sec"] = None
    print(json.dumps(info, indent=2))
    return 0
