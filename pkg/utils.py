import csv
import json
import re
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence


def create_output_directory(base: str, subcommand: str) -> Path:
    """Çıktı klasörünü oluşturur: <base>/<subcommand>"""
    try:
        output_dir = Path(base) / sanitize_filename(subcommand)
        output_dir.mkdir(parents=True, exist_ok=True)
        return output_dir
    except OSError as e:
        raise RuntimeError(f"Çıktı klasörü oluşturma hatası: {str(e)}")


def format_cell(value: Any) -> str:
    """CSV hücresi: float'lar repr ile (bit düzeyinde tekrar üretilebilir)"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True, default=str)
        f.write("\n")
    return path


def sanitize_filename(filename: str) -> str:
    """Dosya adını güvenli hale getirir"""
    filename = re.sub(r'[<>:"/\\|?*\s]', '_', filename)
    filename = filename.strip('. ')
    return filename or "run"


def format_duration(seconds: float) -> str:
    """Süreyi okunabilir formatta döndürür"""
    if seconds < 1:
        return f"{seconds * 1000:.0f} ms"
    elif seconds < 60:
        return f"{seconds:.1f} s"
    elif seconds < 3600:
        return f"{seconds / 60:.1f} dk"
    else:
        return f"{seconds / 3600:.1f} sa"
