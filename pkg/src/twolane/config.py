"""Service configuration, loaded from a YAML file.

Keys (all optional, defaults below): bank.path, bank.k, embed.kind,
embed.dim, embed.endpoint, embed.model, planner.kind, planner.endpoint,
planner.model, planner.template, aligner.alpha, sim.width, sim.height,
server.listen_addr, providers.timeout_s, log.dir.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from . import bank as bank_mod
from . import executive, planner
from .embedding import EmbedderKind, EmbedderSpec


@dataclass
class Config:
    bank_path: Optional[str] = None  # packaged starter bank when unset
    bank_k: int = 1
    embed_kind: str = "builtin"
    embed_dim: int = 512
    embed_endpoint: str = ""
    embed_model: str = ""
    planner_kind: str = "oracle"
    planner_endpoint: str = ""
    planner_model: str = ""
    planner_template: str = "planner_default"
    aligner_alpha: float = 0.75
    sim_width: int = 8
    sim_height: int = 8
    server_listen_addr: str = "127.0.0.1:8712"
    providers_timeout_s: float = 10.0
    log_dir: Optional[str] = None

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        cfg = cls()

        def get(section: str, key: str, default):
            return (raw.get(section) or {}).get(key, default)

        cfg.bank_path = get("bank", "path", cfg.bank_path)
        cfg.bank_k = int(get("bank", "k", cfg.bank_k))
        cfg.embed_kind = get("embed", "kind", cfg.embed_kind)
        cfg.embed_dim = int(get("embed", "dim", cfg.embed_dim))
        cfg.embed_endpoint = get("embed", "endpoint", cfg.embed_endpoint)
        cfg.embed_model = get("embed", "model", cfg.embed_model)
        cfg.planner_kind = get("planner", "kind", cfg.planner_kind)
        cfg.planner_endpoint = get("planner", "endpoint", cfg.planner_endpoint)
        cfg.planner_model = get("planner", "model", cfg.planner_model)
        cfg.planner_template = get("planner", "template", cfg.planner_template)
        cfg.aligner_alpha = float(get("aligner", "alpha", cfg.aligner_alpha))
        cfg.sim_width = int(get("sim", "width", cfg.sim_width))
        cfg.sim_height = int(get("sim", "height", cfg.sim_height))
        cfg.server_listen_addr = get("server", "listen_addr", cfg.server_listen_addr)
        cfg.providers_timeout_s = float(get("providers", "timeout_s", cfg.providers_timeout_s))
        cfg.log_dir = get("log", "dir", cfg.log_dir)
        return cfg

    def embedder_spec(self) -> EmbedderSpec:
        return EmbedderSpec(
            kind=EmbedderKind(self.embed_kind),
            dimension=self.embed_dim,
            endpoint=self.embed_endpoint,
            model_name=self.embed_model,
        )

    def planner_spec(self) -> planner.PlannerSpec:
        return planner.PlannerSpec(
            kind=planner.PlannerKind(self.planner_kind),
            endpoint=self.planner_endpoint,
            model_name=self.planner_model,
            prompt_template_id=self.planner_template,
        )

    def executive_config(self) -> executive.ExecutiveConfig:
        embedder = self.embedder_spec()
        if self.bank_path:
            bank = bank_mod.load_bank(self.bank_path, embedder=embedder, on_mismatch="recompute")
        else:
            bank = bank_mod.starter_bank(embedder=embedder)
        return executive.ExecutiveConfig(
            bank=bank,
            planner_spec=self.planner_spec(),
            embedder=embedder,
            k=self.bank_k,
            providers_timeout_s=self.providers_timeout_s,
        )

    def to_dict(self) -> dict:
        return {
            "bank": {"path": self.bank_path, "k": self.bank_k},
            "embed": {
                "kind": self.embed_kind,
                "dim": self.embed_dim,
                "endpoint": self.embed_endpoint,
                "model": self.embed_model,
            },
            "planner": {
                "kind": self.planner_kind,
                "endpoint": self.planner_endpoint,
                "model": self.planner_model,
                "template": self.planner_template,
            },
            "aligner": {"alpha": self.aligner_alpha},
            "sim": {"width": self.sim_width, "height": self.sim_height},
            "server": {"listen_addr": self.server_listen_addr},
            "providers": {"timeout_s": self.providers_timeout_s},
            "log": {"dir": self.log_dir},
        }
