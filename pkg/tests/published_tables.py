"""Published figures typed in directly, independent of the JSON fixtures.

Used as oracles: anything the engine computes from the fixtures is compared
against arithmetic on these literals.
"""

from __future__ import annotations

# category -> (R1, R2, R3, R4) total removals; None where the row is "--"
REMOVALS = {
    "Adult Nudity and Sexual Activity": (950_816, 1_150_038, 1_351_522, 898_264),
    "Adult Sexual Solicitation / Explicit Language": (None, None, None, 97_855),
    "Bullying and Harassment": (837_741, 1_297_196, 1_176_634, 480_721),
    "Child Endangerment / Nudity": (47_154, 22_582, 133_229, 84_166),
    "Child Sexual Exploitation": (60_364, 145_984, 110_226, None),
    "Cybersecurity": (None, None, None, 3_406),
    "Dangerous Orgs - Hate Orgs": (46_338, 70_430, 45_839, None),
    "Dangerous Orgs - Terrorism": (26_038, 166_098, 76_224, None),
    "Dangerous Individuals and Orgs": (None, None, None, 100_862),
    "Fraud and Deception": (None, None, None, 115_444),
    "Hate Speech": (1_521_669, 1_509_400, 1_450_002, 716_246),
    "Restricted Goods - Drugs": (49_478, 45_810, 32_877, None),
    "Restricted Goods - Firearms": (7_094, 33_806, 11_571, None),
    "Restricted Goods and Services (Merged)": (None, None, None, 145_910),
    "Spam": (None, 29_628_165, 5_200_240, 3_242_761),
    "Suicide, Self-Injury": (153_051, 92_854, 106_042, None),
    "Suicide, Self-Injury and Eating Disorders": (None, None, None, 51_638),
    "Third-Party Intellectual Property Infringement": (None, None, None, 145_848),
    "Violence and Incitement": (1_188_216, 1_400_781, 1_033_996, 556_201),
    "Violent and Graphic Content": (10_184, 105_287, 155_372, 28_833),
}
TOTALS = (76_298_413, 37_039_411, 12_136_947, 6_760_857)
TOTALS_AUTOMATED = (75_113_462, 35_724_613, 10_535_490, 5_800_826)

# residuals as printed in the prose for Reports 1-4
PRINTED_RESIDUALS = (71_400_270, 1_370_980, 1_253_173, 147_746)

# notice type -> (submitted, removed, restricted) per report
NOTICES = {
    "Intellectual Property (IP)": ((231_334, 74_336, 0), (103_244, 37_262, 0), (89_859, 29_657, 0), (43_895, 14_729, 0)),
    "Defamation": ((64_966, 12_138, 80), (111_252, 20_580, 294), (62_929, 11_953, 117), (35_753, 8_612, 41)),
    "Privacy": ((7_626, 1_305, 4), (29_878, 6_134, 15), (32_267, 6_078, 11), (22_224, 3_216, 4)),
    "Other Illegal Content": ((47_477, 11_065, 310), (151_633, 28_962, 2_199), (137_228, 28_396, 1_774), (61_888, 12_418, 655)),
}
NOTICE_TOTALS = ((351_403, 98_844, 394), (396_007, 92_938, 2_508), (322_283, 76_084, 1_902), (163_760, 38_975, 700))

# (TR terminations, SoR records, printed difference)
TERMINATIONS = (
    (9_506_546, 109_919, 9_396_627),
    (15_360_549, 9_041_495, 6_319_054),
    (17_991_379, 12_560_641, 5_430_738),
    (18_462_723, 23_721_798, -5_259_075),
)

# printed total-removal changes R1->R2, R2->R3, R3->R4 (percent)
PRINTED_TOTAL_CHANGES = (-51.44, -67.25, -44.30)
# printed per-category changes R1->R2
PRINTED_TERRORISM_R1_R2 = 538.0
PRINTED_VIOLENT_GRAPHIC_R1_R2 = 934.1


def column(report: int) -> dict[str, int]:
    """Reported categories of one report (1-based)."""
    return {k: v[report - 1] for k, v in REMOVALS.items() if v[report - 1] is not None}
