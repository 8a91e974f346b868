"""Regenerate src/sanctionflow/data/sdn_feb2024.csv.

The fixture reproduces the aggregate composition of the February 2024 SDN
crypto-address list (entity counts per currency, country and violation,
address totals).  Entity names and addresses are placeholders.
"""

import csv
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "sanctionflow" / "data" / "sdn_feb2024.csv"

# (country, kind, sanction date, violations, n_btc_addresses)
BTC_ENTITIES = [
    # China: 8 drug-trade entities (6 from the October 2023 action), 3 cyber, 2 kingpin
    ("China", "Company", "2023-10-03", ["ILLICIT-DRUGS"], 5),
    ("China", "Company", "2023-10-03", ["ILLICIT-DRUGS"], 5),
    ("China", "Company", "2023-10-03", ["ILLICIT-DRUGS"], 5),
    ("China", "Individual", "2023-10-03", ["ILLICIT-DRUGS"], 4),
    ("China", "Individual", "2023-10-03", ["ILLICIT-DRUGS"], 4),
    ("China", "Individual", "2023-10-03", ["ILLICIT-DRUGS"], 3),
    ("China", "Individual", "2022-04-12", ["ILLICIT-DRUGS"], 3),
    ("China", "Individual", "2023-04-14", ["ILLICIT-DRUGS"], 3),
    ("China", "Individual", "2020-03-02", ["CYBER2"], 4),
    ("China", "Individual", "2020-03-02", ["CYBER2"], 4),
    ("China", "Individual", "2021-11-08", ["CYBER2"], 3),
    ("China", "Individual", "2019-08-21", ["SDNTK"], 3),
    ("China", "Individual", "2019-08-21", ["SDNTK"], 3),
    # Russia
    ("Russia", "Company", "2022-04-05", ["RUSSIA"], 100),
    ("Russia", "Company", "2022-04-05", ["RUSSIA"], 30),
    ("Russia", "Individual", "2020-09-10", ["ELECTION", "CYBER2"], 4),
    ("Russia", "Individual", "2020-09-10", ["ELECTION", "CYBER2"], 4),
    ("Russia", "Individual", "2020-09-10", ["ELECTION", "CYBER2"], 3),
    ("Russia", "Individual", "2021-09-21", ["CYBER2"], 4),
    ("Russia", "Individual", "2021-11-08", ["CYBER2"], 3),
    ("Russia", "Individual", "2022-11-14", ["CYBER2", "RUSSIA"], 3),
    ("Russia", "Individual", "2023-05-19", ["CYBER2"], 3),
    ("Russia", "Individual", "2024-01-23", ["CYBER2"], 3),
    # Iran
    ("Iran", "Individual", "2018-11-28", ["IFSR", "IRGC"], 4),
    ("Iran", "Individual", "2018-11-28", ["CYBER2"], 3),
    # North Korea
    ("North Korea", "Individual", "2023-04-24", ["DPRK3", "DPRK4"], 3),
    ("North Korea", "Individual", "2020-03-02", ["DPRK3"], 3),
    # Ukraine
    ("Ukraine", "Individual", "2020-09-10", ["ELECTION", "CYBER2"], 4),
    ("Ukraine", "Individual", "2020-09-10", ["ELECTION", "CYBER2"], 3),
    # Mexico
    ("Mexico", "Individual", "2021-09-21", ["ILLICIT-DRUGS"], 3),
    ("Mexico", "Individual", "2022-10-18", ["ILLICIT-DRUGS"], 3),
    ("Mexico", "Individual", "2019-11-14", ["SDNTK"], 3),
    # companies-only jurisdictions
    ("Canada", "Company", "2021-09-21", ["CYBER2"], 25),
    ("Czech Republic", "Company", "2021-09-21", ["CYBER2"], 30),
    ("St. Vincent", "Company", "2021-11-08", ["CYBER2"], 20),
    ("Gaza", "Company", "2023-10-18", ["SDGT"], 15),
    ("CIS", "Company", "2022-04-05", ["CYBER2"], 40),
    # single-entity countries
    ("Latvia", "Individual", "2021-11-08", ["CYBER2"], 4),
    ("Ghana", "Individual", "2019-08-21", ["CYBER2"], 3),
    ("Nigeria", "Individual", "2019-08-21", ["CYBER2"], 3),
    ("Kyrgyzstan", "Individual", "2023-05-19", ["CYBER2"], 4),
    ("Malaysia", "Individual", "2020-12-17", ["NPWMD"], 4),
    ("United States", "Individual", "2022-11-14", ["CYBER2"], 4),
]

# non-BTC addresses: ETH about a quarter of the list, 15 further currencies share the rest
OTHER_CURRENCIES = [
    ("ETH", 150), ("USDT", 20), ("TRX", 10), ("XMR", 5), ("LTC", 5),
    ("ZEC", 3), ("DASH", 3), ("BCH", 3), ("BSV", 2), ("BTG", 2),
    ("ETC", 2), ("XVG", 2), ("USDC", 2), ("ARB", 2), ("BSC", 1), ("SOL", 1),
]
N_NON_BTC_ENTITIES = 13


def rows():
    for i, (country, kind, day, codes, n) in enumerate(BTC_ENTITIES, start=1):
        eid = f"SDN-{i:03d}"
        for j in range(n):
            for code in codes:
                yield (eid, f"BTC entity {i:02d}", kind, country, day, code, "XBT", f"bc1qsdnfixture{i:02d}{j:03d}")
    # other-currency addresses spread over the BTC entities and 13 entities without BTC
    holders = [(f"SDN-{i:03d}", BTC_ENTITIES[i - 1]) for i in range(1, len(BTC_ENTITIES) + 1)]
    others = [
        (f"SDN-{100 + k:03d}", ("Russia" if k % 2 else "Iran", "Individual", "2022-04-05", ["CYBER2"], 0))
        for k in range(1, N_NON_BTC_ENTITIES + 1)
    ]
    k = 0
    for currency, n in OTHER_CURRENCIES:
        for j in range(n):
            pool = others if k % 3 == 0 or k < N_NON_BTC_ENTITIES * 3 else holders
            eid, (country, kind, day, codes, _) = pool[k % len(pool)]
            name = f"BTC entity {int(eid[4:]):02d}" if pool is holders else f"Other entity {int(eid[4:]) - 100:02d}"
            yield (eid, name, kind, country, day, codes[0], currency, f"{currency.lower()}-sdnfixture-{j:03d}")
            k += 1


def main():
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("entity_id", "name", "kind", "country", "sanction_date", "violation", "currency", "address"))
        w.writerows(rows())
    print(f"wrote {OUT}", file=sys.stderr)


if __name__ == "__main__":
    main()
