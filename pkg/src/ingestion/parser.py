from dataclasses import dataclass
from typing import Iterable, List, TextIO, Tuple

from src.utils.errors import IngestionError, ParseError


@dataclass(frozen=True)
class InteractionRecord:
    """One `user<TAB>item<TAB>tag,tag,...` entry: a user collected an item and
    attached zero or more tags to it."""

    user: str
    item: str
    tags: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.user or not self.item:
            raise IngestionError(f"empty label in record {self!r}")
        if any(not tag for tag in self.tags):
            raise IngestionError(f"empty tag in record {self!r}")
        if len(set(self.tags)) != len(self.tags):
            raise IngestionError(f"duplicate tag in record {self!r}")
        if any('\t' in label or ',' in label for label in (self.user, self.item)):
            raise IngestionError(f"label contains TAB or comma in record {self!r}")
        if any('\t' in tag or ',' in tag for tag in self.tags):
            raise IngestionError(f"tag contains TAB or comma in record {self!r}")

    @classmethod
    def of(cls, user, item, tags=()):
        #dedupes tags, keeping first occurrence
        return cls(user, item, tuple(dict.fromkeys(tags)))


def parse_interactions(stream: TextIO) -> List[InteractionRecord]:
    #one record per non-blank, non-comment line, file order preserved
    records = []
    for line_number, raw in enumerate(stream, start=1):
        line = raw.rstrip('\r\n')
        if not line.strip() or line.startswith('#'):
            continue

        fields = line.split('\t')
        if len(fields) != 3:
            raise ParseError(line_number, f"expected 3 TAB-separated fields, got {len(fields)}")

        user, item, tag_field = fields
        if not user:
            raise ParseError(line_number, "empty user field")
        if not item:
            raise ParseError(line_number, "empty item field")
        if ',' in user or ',' in item:
            raise ParseError(line_number, "labels must not contain a comma")

        tags = tag_field.split(',') if tag_field else []
        if any(not tag for tag in tags):
            raise ParseError(line_number, "empty tag in tag list")

        records.append(InteractionRecord.of(user, item, tags))
    return records


def write_interactions(records: Iterable[InteractionRecord], stream: TextIO) -> int:
    #canonical form of the wire format; returns number of lines written
    count = 0
    for record in records:
        stream.write(f"{record.user}\t{record.item}\t{','.join(record.tags)}\n")
        count += 1
    return count
