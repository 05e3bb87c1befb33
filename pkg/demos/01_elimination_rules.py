"""
Borda, Baldwin and Nanson on a five-voter election
==================================================

Three voters rank a > b > c and two rank b > c > a.  Borda picks b, but both
elimination rules pick a.  The traces show why.
"""

from elimvote import BALDWIN, BORDA, NANSON, Profile, borda_scores, elect, parse_profile, reversal

profile = Profile.from_rankings("abc", ["abc"] * 3 + ["bca"] * 2)
print("Borda scores:", {profile.candidates[c]: int(s) for c, s in borda_scores(profile).items()})

# Borda stops here: b has the highest total.
for rule in (BORDA, BALDWIN, NANSON):
    winner, trace = elect(rule, profile)
    print(f"\n{rule}: winner {profile.candidates[winner]}")
    for r in trace.rounds:
        scores = ", ".join(f"{profile.candidates[c]}={s}" for c, s in r.scores.items())
        out = ",".join(profile.candidates[c] for c in r.eliminated) or "-"
        print(f"  scores {scores}  average {r.average}  eliminated {out}")

# Once c is gone, a beats b 3 to 2 head to head, so re-scoring hands a the win.
# Traces serialize with exact rational scores:
print("\n" + elect(NANSON, profile)[1].to_json(indent=1))

# Nanson is reversal symmetric: flipping every ballot never keeps a strict
# winner.  Baldwin is not.  Here b wins both the election and its mirror image.
mirror_proof = parse_profile("""
candidates: a,b,c,d
1: a>b>d>c
1: d>a>c>b
1: b>d>a>c
1: c>b>a>d
1: c>a>b>d
1: b>a>d>c
1: d>c>b>a
1: a>c>d>b
1: d>b>a>c
""")
print("\nBaldwin winner:", mirror_proof.candidates[elect(BALDWIN, mirror_proof)[0]],
      "| on reversed ballots:", mirror_proof.candidates[elect(BALDWIN, reversal(mirror_proof))[0]])
