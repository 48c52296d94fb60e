"""
Replika havuzu: bağımsız görevleri sıralı olarak çalıştırır.

Her görev kendi SeedSpec'ini taşır; sonuç listesi işçi sayısından bağımsızdır.
"""
from multiprocessing import Pool
from typing import Any, Callable, List, Sequence


def run_replicates(worker: Callable[[Any], Any], tasks: Sequence[Any], threads: int = 1,
                   label: str = "replika") -> List[Any]:
    """worker'ı görevler üzerinde uygular, sonuçları görev sırasıyla döner.

    worker modül seviyesinde tanımlı olmalı (pickle edilebilir).
    """
    tasks = list(tasks)
    if not tasks:
        return []
    if threads is None or threads <= 1 or len(tasks) == 1:
        return [worker(task) for task in tasks]

    processes = min(int(threads), len(tasks))
    chunksize = max(1, len(tasks) // (processes * 8))
    print(f"🧵 {label} havuzu başlatıldı ({processes} işçi, {len(tasks)} görev)")
    with Pool(processes=processes) as pool:
        results = pool.map(worker, tasks, chunksize=chunksize)
    print(f"🛑 {label} havuzu kapatıldı")
    return results
