// Copyright 2026 The czgec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Default Czech typical-error table; data/czech_typical_errors.tsv holds the
// same text (a test keeps the two in sync).

#include <string_view>

namespace czgec {

inline constexpr std::string_view kDefaultCzechRules = R"RULES(
# Typical Czech errors.
# rule_id	kind	pattern	replacement[,replacement...]	probability	[case: preserve|literal]
# kinds: token-literal, substring, prefix, sentence-boundary-case, punctuation
# "\," is a literal comma inside a replacement; "<none>" is the empty replacement.
mne_me	token-literal	mně	mě	0.05
me_mne	token-literal	mě	mně	0.05
bychom_bysme	token-literal	bychom	bysme	0.05
abychom_abysme	token-literal	abychom	abysme	0.05
kdybychom_kdybysme	token-literal	kdybychom	kdybysme	0.05
dvema_dvouma	token-literal	dvěma	dvouma	0.05
obema_obouma	token-literal	oběma	obouma	0.05
bi_by	substring	bi	by	0.05
by_bi	substring	by	bi	0.05
fi_fy	substring	fi	fy	0.05
fy_fi	substring	fy	fi	0.05
li_ly	substring	li	ly	0.05
ly_li	substring	ly	li	0.05
mi_my	substring	mi	my	0.05
my_mi	substring	my	mi	0.05
pi_py	substring	pi	py	0.05
py_pi	substring	py	pi	0.05
si_sy	substring	si	sy	0.05
sy_si	substring	sy	si	0.05
vi_vy	substring	vi	vy	0.05
vy_vi	substring	vy	vi	0.05
zi_zy	substring	zi	zy	0.05
zy_zi	substring	zy	zi	0.05
bii_byy	substring	bí	bý	0.05
byy_bii	substring	bý	bí	0.05
lii_lyy	substring	lí	lý	0.05
lyy_lii	substring	lý	lí	0.05
mii_myy	substring	mí	mý	0.05
myy_mii	substring	mý	mí	0.05
sii_syy	substring	sí	sý	0.05
syy_sii	substring	sý	sí	0.05
vii_vyy	substring	ví	vý	0.05
vyy_vii	substring	vý	ví	0.05
uu_ring	substring	ú	ů	0.05
ring_uu	substring	ů	ú	0.05
s_z_prefix	prefix	s	z	0.05
z_s_prefix	prefix	z	s	0.05
initial_lower	sentence-boundary-case	*	<lower>	0.05
comma_del	punctuation	,	<none>	0.05
comma_ins_a	punctuation	a	\, a	0.05
)RULES";

}  // namespace czgec
