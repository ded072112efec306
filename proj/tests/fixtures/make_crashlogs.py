#!/usr/bin/env python3
"""Regenerates tests/fixtures/crashlogs: a deterministic set of Apple-style
crash reports for one app across two major versions, plus two unreadable
reports."""

import datetime as dt
import pathlib
import random
import uuid

OUT = pathlib.Path(__file__).with_name("crashlogs")

TEMPLATE = """Incident Identifier: {incident}
CrashReporter Key: {key}
Hardware Model: {hardware}
Process: Vtok [{pid}]
Path: /var/mobile/Applications/{path_id}/Vtok.app/Vtok
Identifier: Vtok
Version: {version}
Code Type: ARM (Native)
Parent Process: launchd [1]

Date/Time: {when}
OS Version: iPhone OS 5.0 (9A334)
Report Version: 104

Exception Type: EXC_BAD_ACCESS (SIGSEGV)
Exception Codes: KERN_PROTECTION_FAILURE at 0x2fd00fe8
Crashed Thread: {thread}

Thread 0 name: Dispatch queue: com.apple.main-thread
Thread 0 Crashed:
0 libsystem_c.dylib 0x380ca308 0x380be000 + 49928
1 CoreFoundation 0x3710d946 0x37071000 + 641350
"""

# Weekly crash counts for version 2, rising then decaying.
WEEKLY_V2 = [3, 7, 11, 12, 11, 9, 8, 6, 5, 3, 2, 2, 1]


def stamp(t: dt.datetime) -> str:
    offset = t.utcoffset()
    minutes = int(offset.total_seconds() // 60)
    sign = "+" if minutes >= 0 else "-"
    minutes = abs(minutes)
    return t.strftime("%Y-%m-%d %H:%M:%S.") + f"{t.microsecond // 1000:03d} {sign}{minutes // 60:02d}{minutes % 60:02d}"


def main() -> None:
    rng = random.Random(20120206)
    OUT.mkdir(exist_ok=True)
    for old in OUT.iterdir():
        old.unlink()
    tz = dt.timezone(dt.timedelta(hours=3))
    start = dt.datetime(2012, 2, 6, 9, 0, tzinfo=tz)  # a Monday
    reports = []
    for week, count in enumerate(WEEKLY_V2):
        for _ in range(count):
            when = start + dt.timedelta(weeks=week, seconds=rng.randrange(6 * 86400))
            when = when.replace(microsecond=rng.randrange(1000) * 1000)
            reports.append((when, "2.1 (210)"))
    for i in range(12):
        when = start - dt.timedelta(days=60 - 4 * i, seconds=rng.randrange(86400))
        reports.append((when, "1.4 (140)" if i % 3 else "??? (???)"))
    reports.sort()
    for n, (when, version) in enumerate(reports):
        text = TEMPLATE.format(
            incident=str(uuid.UUID(int=rng.getrandbits(128))).upper(),
            key=f"{rng.getrandbits(160):040x}",
            hardware=rng.choice(["iPhone4,1", "iPhone3,1", "iPad2,1"]),
            pid=rng.randrange(100, 9999),
            path_id=str(uuid.UUID(int=rng.getrandbits(128))).upper(),
            version=version,
            when=stamp(when),
            thread=rng.choice([0, 0, 0, 2, 5]),
        )
        (OUT / f"Vtok_{n:03d}.crash").write_text(text)
    (OUT / "broken_no_date.crash").write_text("Identifier: Vtok\nVersion: 2.1 (210)\nCrashed Thread: 0\n")
    (OUT / "broken_bad_date.crash").write_text("Identifier: Vtok\nDate/Time: yesterday\n")


if __name__ == "__main__":
    main()
