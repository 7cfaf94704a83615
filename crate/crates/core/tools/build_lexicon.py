"""Builds data/lexicon.tsv from hand-curated synonym groups.

Every word in a group lists the other members of the group as synonyms.
Words appearing in several groups receive the union (in group order).
"""
import collections
import pathlib

GROUPS = """
good great fine excellent superb terrific splendid
enjoyable fun entertaining delightful pleasant amusing agreeable
beautiful gorgeous lovely stunning elegant graceful exquisite
clever smart witty brilliant sharp ingenious inventive
moving touching poignant stirring heartfelt affecting tender
exciting thrilling gripping riveting electrifying exhilarating rousing
funny hilarious comical humorous witty droll uproarious
charming appealing endearing engaging winning captivating enchanting
impressive remarkable outstanding exceptional extraordinary striking notable
fresh original novel innovative creative imaginative inventive
strong powerful forceful potent robust compelling vigorous
warm friendly genial cordial kindly gracious affable
honest sincere genuine truthful candid frank earnest
smooth polished slick refined accomplished skillful deft
rich lush vivid colorful luxuriant opulent sumptuous
bad awful terrible dreadful horrible lousy atrocious
boring dull tedious tiresome monotonous bland uninspired
ugly hideous unsightly grotesque repulsive unattractive homely
stupid dumb foolish silly idiotic inane senseless
weak feeble flimsy limp lame frail anemic
confusing muddled baffling bewildering perplexing puzzling incoherent
annoying irritating grating irksome vexing galling tiresome
clumsy awkward ungainly inept bumbling gawky maladroit
shallow superficial hollow empty vapid trivial slight
messy sloppy untidy disorganized chaotic careless slapdash
cheap tacky shoddy tawdry trashy gaudy chintzy
painful agonizing excruciating harrowing unbearable grueling torturous
pointless useless futile worthless aimless meaningless vain
predictable formulaic routine stale trite hackneyed clichéd
disappointing unsatisfying underwhelming lackluster mediocre unimpressive middling
movie film picture feature flick motion_picture cinema
story plot narrative tale storyline chronicle saga
actor performer player thespian star lead
director filmmaker auteur helmer moviemaker
scene sequence episode segment passage moment
ending finale conclusion climax denouement close
character figure protagonist persona role personage
script screenplay dialogue text scenario lines
music score soundtrack melody tune composition
camera lens photography cinematography imagery shots
audience viewers spectators crowd public onlookers
critic reviewer commentator pundit judge
studio company producer distributor outfit
budget funds money finances resources capital
length duration running_time span extent runtime
theme subject topic motif idea concept
style manner fashion approach technique mode
effort attempt try endeavor undertaking venture
drama melodrama tragedy play piece production
comedy farce satire parody spoof lampoon
hero champion protagonist savior victor idol
villain antagonist scoundrel rogue rascal miscreant
world universe realm domain sphere setting
city town metropolis municipality borough urban
house home dwelling residence abode household
car automobile vehicle auto sedan motorcar
road street avenue lane highway boulevard
child kid youngster youth juvenile minor
woman lady female dame matron madam
man gentleman guy fellow chap male
friend companion comrade buddy pal ally
family household clan kin relatives kindred
job work occupation profession career employment
problem issue difficulty trouble complication snag
answer reply response retort rejoinder riposte
question query inquiry problem puzzle riddle
idea notion thought concept conception impression
reason cause motive ground rationale basis
result outcome consequence effect upshot product
place location spot site position venue
time period era epoch age span
day date daytime daylight
night evening dusk nightfall twilight
food meal fare cuisine nourishment dish
money cash currency funds capital wealth
book volume tome novel publication text
word term expression phrase utterance locution
voice tone sound vocal timbre
face visage countenance features physiognomy
eye gaze glance look stare
hand palm fist grip grasp
heart core center nucleus essence soul
mind intellect brain wit reason intelligence
power strength might force energy vigor
speed pace velocity rate tempo swiftness
size magnitude dimension scale bulk extent
shape form figure outline silhouette contour
color hue shade tint tone tinge
light glow radiance brightness illumination gleam
dark dim gloomy murky shadowy shady
big large huge enormous vast immense massive
small little tiny minute miniature petite compact
fast quick rapid swift speedy brisk hasty
slow sluggish leisurely unhurried plodding languid
old ancient aged elderly antique vintage
new recent modern novel current contemporary
long lengthy extended prolonged protracted extensive
short brief concise succinct compact terse
happy glad joyful cheerful merry jolly content
sad unhappy sorrowful gloomy melancholy dejected mournful
angry furious irate livid enraged incensed mad
afraid scared frightened fearful terrified alarmed anxious
brave courageous bold fearless valiant heroic daring
calm peaceful serene tranquil placid quiet still
loud noisy deafening thunderous booming blaring raucous
quiet silent hushed muted soundless noiseless
easy simple effortless painless straightforward uncomplicated
hard difficult tough arduous demanding laborious strenuous
hot warm heated scorching sweltering boiling torrid
cold chilly cool frigid icy freezing frosty
rich wealthy affluent prosperous opulent moneyed
poor impoverished needy destitute penniless indigent
true accurate correct exact precise factual
false untrue incorrect wrong erroneous mistaken
important significant crucial vital essential key
strange odd weird peculiar bizarre unusual curious
common ordinary usual normal typical standard
rare uncommon scarce infrequent unusual sparse
clean spotless pristine immaculate tidy neat
dirty filthy grimy soiled grubby unclean
safe secure protected guarded sheltered sound
dangerous hazardous risky perilous unsafe treacherous
kind generous caring compassionate benevolent considerate
cruel brutal savage vicious merciless ruthless
wise sage sensible prudent shrewd judicious
famous renowned celebrated acclaimed eminent noted
quick prompt speedy immediate instant hasty
tired exhausted weary fatigued drained sleepy
busy occupied engaged active hectic bustling
empty vacant bare void hollow unoccupied
full complete entire whole total packed
real actual genuine authentic true legitimate
fake false counterfeit phony sham bogus
nice kind pleasant lovely agreeable delightful
serious grave solemn somber earnest sober
crazy insane mad deranged unhinged lunatic
perfect flawless ideal faultless impeccable exemplary
huge gigantic colossal mammoth titanic monumental
begin start commence initiate launch open
end finish conclude terminate complete close
make create produce build construct fashion
show display exhibit present reveal demonstrate
tell inform notify advise apprise relate
say state declare remark assert mention
see notice observe spot perceive witness
look glance peek peer gaze watch
know understand comprehend grasp realize recognize
think believe consider suppose reckon deem
want desire wish crave covet yearn
need require demand lack necessitate
give provide offer supply grant donate
take grab seize grasp snatch clutch
help assist aid support abet serve
try attempt endeavor strive seek venture
use employ utilize apply exploit wield
find discover locate uncover detect unearth
keep retain hold preserve maintain save
leave depart exit go quit vacate
come arrive approach appear reach enter
move shift transfer relocate budge stir
run sprint dash race hurry bolt
walk stroll stride march amble saunter
talk speak converse chat discuss chatter
laugh chuckle giggle chortle snicker cackle
cry weep sob wail whimper bawl
love adore cherish treasure worship idolize
hate loathe detest despise abhor dislike
like enjoy relish appreciate fancy savor
fight battle combat struggle clash brawl
win triumph succeed prevail conquer overcome
lose forfeit misplace mislay drop
change alter modify adjust amend transform
fix repair mend restore patch remedy
break shatter smash fracture crack split
build erect construct assemble raise fabricate
buy purchase acquire obtain procure get
sell vend trade market peddle retail
watch view observe monitor survey eye
hear listen overhear heed attend
feel sense perceive experience undergo
play perform act portray enact depict
write compose pen draft author script
read peruse scan study browse skim
learn study master absorb acquire pick_up
teach instruct educate train tutor coach
ask inquire query question request quiz
answer reply respond retort rejoin return
call summon phone ring shout yell
wait linger remain stay tarry pause
stop halt cease quit end discontinue
grow increase expand swell enlarge develop
fall drop tumble plunge descend collapse
rise ascend climb mount soar lift
hide conceal cover mask obscure veil
seem appear look sound feel
destroy ruin wreck demolish devastate annihilate
praise commend laud acclaim applaud extol
blame accuse criticize censure condemn fault
admire respect esteem revere honor venerate
surprise astonish amaze astound stun startle
worry fret fear brood agonize stew
hope wish aspire expect anticipate dream
remember recall recollect recognize reminisce retain
forget overlook neglect omit ignore disregard
explain clarify describe elucidate interpret illustrate
agree concur consent assent accede comply
refuse decline reject spurn rebuff deny
allow permit let authorize sanction enable
choose select pick elect opt decide
carry bear convey transport haul tote
throw toss hurl fling pitch cast
pull drag tug haul draw yank
push shove thrust press propel nudge
cut slice chop carve sever trim
join connect link unite attach combine
gather collect assemble accumulate amass muster
spread scatter distribute disperse diffuse broadcast
really truly genuinely actually honestly indeed
quite rather fairly somewhat pretty reasonably
often frequently regularly repeatedly commonly routinely
always forever constantly invariably perpetually continually
never nevermore
almost nearly practically virtually roughly approximately
quickly rapidly swiftly speedily hastily briskly
slowly gradually leisurely steadily unhurriedly sluggishly
suddenly abruptly unexpectedly instantly swiftly
finally eventually ultimately lastly
probably likely presumably possibly perhaps maybe
certainly surely definitely undoubtedly clearly positively
completely totally entirely wholly fully utterly
mostly largely mainly chiefly primarily generally
simply merely purely plainly just
""".strip().splitlines()

syns = collections.OrderedDict()
for line in GROUPS:
    words = line.split()
    for w in words:
        lst = syns.setdefault(w, [])
        for o in words:
            if o != w and o not in lst:
                lst.append(o)

out = pathlib.Path(__file__).resolve().parent.parent / "data" / "lexicon.tsv"
with open(out, "w", encoding="utf-8") as f:
    f.write("# Synonym lexicon: headword<TAB>comma-separated synonyms.\n")
    f.write("# Generated by tools/build_lexicon.py from hand-curated synonym groups.\n")
    for w, lst in syns.items():
        if lst:
            f.write(f"{w}\t{','.join(lst)}\n")
print(len(syns), "headwords")
