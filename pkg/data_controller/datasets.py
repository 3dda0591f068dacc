import logging
from json import dumps, loads
from pathlib import Path
from typing import Dict, List

import numpy as np

from core.api import file_digest
from core.checks import DatasetError, UsageError
from core.exact import ReferenceImport, ReferenceSolution, \
    export_references, import_references
from core.tsp import TspInstance, generate, load_instance, save_instance

MANIFEST = 'manifest.json'
INSTANCES = 'instances'
REFERENCES = 'references.jsonl'

logger = logging.getLogger(__name__)


def instance_seeds(seed: int, count: int) -> List[int]:
    """
    Independent per-instance seeds spawned from the dataset seed.
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


class Dataset:
    """
    A directory of instance files bound to a manifest. The manifest pins
    the generator seed and the SHA-256 of every instance file.
    """
    __slots__ = ('path', 'manifest', '_instances')

    def __init__(self, path: Path, manifest: dict):
        self.path = path
        self.manifest = manifest
        self._instances = None

    @property
    def dataset_id(self) -> str:
        return self.manifest['id']

    @property
    def n(self) -> int:
        return self.manifest['n']

    @property
    def instance_ids(self) -> List[str]:
        return [entry['id'] for entry in self.manifest['instances']]

    @property
    def references_path(self) -> Path:
        return self.path.joinpath(REFERENCES)

    @classmethod
    def create(cls, path: Path, n: int, count: int, seed: int,
               overwrite: bool = False):
        """
        Generate `count` instances of `n` vertices. Identical arguments
        give byte-identical directories.

        :raises UsageError: if `path` is a non-empty directory and
            `overwrite` is not set.
        """
        if count < 1:
            raise UsageError(f'count must be positive, got {count}')
        if path.exists() and any(path.iterdir()) and not overwrite:
            raise UsageError(f'{path} is not empty, pass --overwrite to '
                             f'replace it')
        inst_dir = path.joinpath(INSTANCES)
        inst_dir.mkdir(parents=True, exist_ok=True)
        for stale in inst_dir.glob('*.json'):
            stale.unlink()
        if path.joinpath(REFERENCES).exists():
            path.joinpath(REFERENCES).unlink()

        dataset_id = f'tsp{n}-c{count}-s{seed}'
        width = max(4, len(str(count - 1)))
        entries = []
        for i, inst_seed in enumerate(instance_seeds(seed, count)):
            instance_id = f'{i:0{width}d}'
            file = inst_dir.joinpath(f'{instance_id}.json')
            save_instance(file, generate(n, inst_seed, instance_id))
            entries.append({'id': instance_id, 'seed': inst_seed,
                            'sha256': file_digest(file)})
        manifest = {'id': dataset_id, 'n': n, 'count': count, 'seed': seed,
                    'instances': entries}
        path.joinpath(MANIFEST).write_text(
            dumps(manifest, indent=2) + '\n', encoding='utf-8')
        logger.log(logging.INFO, f'Wrote {count} instances to {path}')
        return cls(path, manifest)

    @classmethod
    def load(cls, path: Path):
        """
        Open a dataset and check it against its manifest.

        :raises DatasetError: if the manifest is missing or its count, ids or
            digests disagree with the instance files.
        """
        manifest_file = path.joinpath(MANIFEST)
        if not manifest_file.is_file():
            raise DatasetError(f'no {MANIFEST} in {path}')
        try:
            manifest = loads(manifest_file.read_text(encoding='utf-8'))
        except ValueError as e:
            raise DatasetError(f'malformed manifest in {path}: {e}')
        missing = [key for key in ('id', 'n', 'count', 'seed', 'instances')
                   if key not in manifest]
        if missing:
            raise DatasetError(f'manifest in {path} lacks '
                               f'{", ".join(missing)}')
        entries, count = manifest['instances'], manifest['count']
        files = sorted(path.joinpath(INSTANCES).glob('*.json'))
        if count != len(entries) or count != len(files):
            raise DatasetError(f'manifest lists {count} instances, found '
                               f'{len(entries)} entries and {len(files)} '
                               f'instance files')
        on_disk = {f.stem for f in files}
        for entry in entries:
            if entry['id'] not in on_disk:
                raise DatasetError(f'instance {entry["id"]} has no file')
            file = path.joinpath(INSTANCES, f'{entry["id"]}.json')
            if file_digest(file) != entry['sha256']:
                raise DatasetError(f'instance {entry["id"]} does not match '
                                   f'its manifest digest')
        return cls(path, manifest)

    def instances(self) -> List[TspInstance]:
        """
        :return: the instances, in manifest order.
        """
        if self._instances is None:
            inst_dir = self.path.joinpath(INSTANCES)
            self._instances = [
                load_instance(inst_dir.joinpath(f'{i}.json'), i)
                for i in self.instance_ids]
            for inst in self._instances:
                if inst.n != self.n:
                    raise DatasetError(f'instance {inst.instance_id} has '
                                       f'{inst.n} vertices, manifest says '
                                       f'{self.n}')
        return self._instances

    def instance_map(self) -> Dict[str, TspInstance]:
        return {inst.instance_id: inst for inst in self.instances()}

    def save_references(self, solutions: List[ReferenceSolution]):
        export_references(self.references_path, solutions)

    def import_references(self, path: Path) -> ReferenceImport:
        return import_references(path, self.instance_map())

    def references(self) -> Dict[str, ReferenceSolution]:
        """
        :return: the dataset's reference solutions by instance id, empty if
            none were solved yet.
        """
        if not self.references_path.is_file():
            return {}
        return self.import_references(self.references_path).accepted
